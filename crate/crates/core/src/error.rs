use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample count {0} must be a power of two and at least 64")]
    GridSize(usize),
    #[error("samples per bit {samples_per_bit} is invalid for {n_samples} samples (need >= 4 and an exact divisor)")]
    SamplesPerBit { n_samples: usize, samples_per_bit: usize },
    #[error("grid sample rate {sample_rate:.4e} Hz does not cover required bandwidth {required:.4e} Hz")]
    GridBandwidth { sample_rate: f64, required: f64 },
    #[error("fields live on incompatible grids")]
    GridMismatch,
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },
    #[error("PRBS seed must be nonzero within the register width")]
    PrbsZeroSeed,
    #[error("no maximal-length polynomial tabulated for PRBS order {0}")]
    PrbsOrder(u32),
    #[error("rise time must be shorter than the bit period")]
    RiseTime,
    #[error("drive level {0} outside [0, 1]")]
    DriveRange(f64),
    #[error("field contains non-finite samples after `{0}`")]
    NonFinite(&'static str),
    #[error("channel index {index} out of range for {n_channels} channels")]
    ChannelIndex { index: usize, n_channels: usize },
    #[error("electrical bandwidth {bandwidth:.4e} Hz is not below Nyquist {nyquist:.4e} Hz")]
    ElectricalBandwidth { bandwidth: f64, nyquist: f64 },
    #[error("waveform length {len} does not match {bits} bits x {samples_per_bit} samples")]
    WaveformLength { len: usize, bits: usize, samples_per_bit: usize },
    #[error("bit alignment failed: best correlation {0:.3} is below 0.5")]
    Alignment(f64),
    #[error("too few marks ({marks}) or spaces ({spaces}) for reliable statistics")]
    TooFewLevels { marks: usize, spaces: usize },
    #[error("eye diagram needs at least 64 bits, got {0}")]
    TooFewBits(usize),
    #[error("resolution bandwidth {rbw:.4e} Hz is below the frequency bin {bin:.4e} Hz")]
    ResolutionBandwidth { rbw: f64, bin: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }
}
