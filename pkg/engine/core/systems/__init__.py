# 定价系统模块
