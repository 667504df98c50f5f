# 共享模块包
