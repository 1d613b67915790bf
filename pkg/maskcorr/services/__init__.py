# Simulation, scheme operators, scenarios and reports
