# 亚式期权定价引擎应用包
