//! Physical constants (CODATA 2018) and conversions into the internal unit
//! system: ℏ = 1, time in ps, energies and frequencies in ps⁻¹.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Elementary charge, C.
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Speed of light, m/s.
pub const C_LIGHT: f64 = 299_792_458.0;
/// One Debye in C·m.
pub const DEBYE: f64 = 1e-21 / C_LIGHT;

/// Seconds per picosecond.
pub const PS: f64 = 1e-12;

/// k_B/ℏ in ps⁻¹ per kelvin. Every temperature enters the numerics through
/// this constant.
pub const KB_OVER_HBAR_PER_PS: f64 = K_B / HBAR * PS;

/// Thermal energy k_B·T expressed as a frequency in ps⁻¹.
pub fn thermal_frequency(temperature_k: f64) -> f64 {
    KB_OVER_HBAR_PER_PS * temperature_k
}

/// Converts an energy in joules to a frequency in ps⁻¹.
pub fn joule_to_inv_ps(energy: f64) -> f64 {
    energy / HBAR * PS
}

/// Converts an angular frequency in s⁻¹ to ps⁻¹.
pub fn inv_s_to_inv_ps(rate: f64) -> f64 {
    rate * PS
}

/// Converts s² to ps².
pub fn s2_to_ps2(x: f64) -> f64 {
    x / (PS * PS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kb_over_hbar_value() {
        assert!((KB_OVER_HBAR_PER_PS - 0.130_92).abs() < 1e-5);
        // 77 K
        assert!((thermal_frequency(77.0) - 10.081).abs() < 1e-3);
    }

    #[test]
    fn debye_value() {
        assert!((DEBYE - 3.335_640_95e-30).abs() < 1e-38);
    }
}
