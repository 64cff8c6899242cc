# Driving-function integrators
