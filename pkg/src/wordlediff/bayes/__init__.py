"""Try, Reports and Hardmoders submodels with their sampler, diagnostics and predictive draws."""
