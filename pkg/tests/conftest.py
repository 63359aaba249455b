from hypothesis import settings

# Property tests must be as reproducible as the simulator they check.
settings.register_profile("deterministic", derandomize=True)
settings.load_profile("deterministic")
