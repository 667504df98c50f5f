# 亚式期权Laplace定价引擎项目根包
