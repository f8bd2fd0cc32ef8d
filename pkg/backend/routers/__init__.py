# HTTP routers: service status, synchronous solves, background experiment runs.
