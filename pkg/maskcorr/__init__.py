# maskcorr: masking quantum information into tripartite correlations
