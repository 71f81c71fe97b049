"""Shock response spectra, low-pass-filter-based SRS (LPSRS) and shock transmissibility."""

from .builder import (
    Platform,
    SuperpositionReport,
    band_amplitudes,
    band_decompose,
    build_lpsrs,
    check_superposition,
    default_cutoffs,
    extract_platform,
    lowpass_record,
)
from .core import (
    AliasingError,
    ClampWarning,
    ContractError,
    CoverageError,
    DampedHarmonic,
    DataError,
    DomainError,
    InconsistencyError,
    InsufficientRateError,
    LpsrsError,
    LpsrsSet,
    ModalTable,
    Mode,
    PlatformQualityWarning,
    RangeError,
    SdofParams,
    SpectrumKind,
    SrsCurve,
    TimeSeries,
    UndersampledWarning,
    db_ratio,
    interpolate_curve,
    loglog_interp,
    octave_grid,
)
from .filters import (
    FilterDesignError,
    FirFilter,
    apply_compensated,
    decimation_factor,
    design_bandpass,
    design_lowpass,
    resample_for_cutoff,
)
from .oracles import (
    duhamel_response,
    modal_interface_response,
    rect_pulse_response,
    rect_pulse_response_lowdamp,
    synth_shock,
)
from .srs import compute_srs, dynamic_amplification, sdof_response
from .transmissibility import (
    Combiner,
    ComponentPrediction,
    FrfCurve,
    FrfSource,
    TransmissibilityBounds,
    ecss_predict_srs,
    ecss_tf_bounds,
    predict_band_amplitude,
    predict_band_srs,
    predict_component,
    upper_bound_abssum,
)

__version__ = "0.1.0"
