from ._gbmap import DataError, Model, NumericError, fit, load, run_drift, synth_cos

__all__ = ["DataError", "Model", "NumericError", "fit", "load", "run_drift", "synth_cos"]
