//! Unit conversions for the exciton model, which runs internally in fs and
//! rad/fs with hbar = 1.

/// 2 pi c in rad fs^-1 per cm^-1 (c = 2.99792458e-5 cm/fs).
pub const CM_TO_RAD_PER_FS: f64 = 2.0 * std::f64::consts::PI * 2.997_924_58e-5;

/// Boltzmann constant in cm^-1 per K.
pub const KB_CM_PER_K: f64 = 0.695_034_8;

/// Wavenumber (cm^-1) to angular frequency (rad/fs).
pub fn wavenumber_to_angular(cm: f64) -> f64 {
    cm * CM_TO_RAD_PER_FS
}

/// Temperature (K) to thermal energy k_B T in rad/fs.
pub fn kelvin_to_angular(kelvin: f64) -> f64 {
    wavenumber_to_angular(kelvin * KB_CM_PER_K)
}
