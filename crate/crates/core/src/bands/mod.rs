//! Bands, gaps, flat bands and negative-energy bands extracted from the
//! spectral condition.

pub mod scan;

pub use scan::{scan_bands, scan_bands_between, scan_with, Band, BandKind, BandScan, ScanOptions};
pub mod flat;

pub use flat::{
    detect_flat_bands, exceptional_flux, exceptional_sites, predict_flat_bands, shrinking_link_lengths,
    FlatBandPrediction, FlatHit, FlatMechanism, FlatPredictions, Parity,
};
pub mod negative;

pub use negative::{asymptotic_negative_point, find_negative_bands};
pub mod closing;

pub use closing::{gap_closing_search, ClosingOptions, GapClosing, SweepParam, TOUCH_WIDTH};
