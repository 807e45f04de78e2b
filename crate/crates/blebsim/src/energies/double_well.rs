//! The double-well potential `W(φ) = ¼(φ² - 1)²` and its derivatives.

use super::EnergyError;

/// `W` and derivatives up to order 5 (all higher orders vanish, but 5 is the
/// highest one appearing in the expansions).
pub fn double_well(phi: f64, order: u32) -> Result<f64, EnergyError> {
    Ok(match order {
        0 => {
            let q = phi * phi - 1.0;
            0.25 * q * q
        }
        1 => phi * phi * phi - phi,
        2 => 3.0 * phi * phi - 1.0,
        3 => 6.0 * phi,
        4 => 6.0,
        5 => 0.0,
        _ => return Err(EnergyError::DerivativeOrder(order)),
    })
}

#[inline]
pub(crate) fn w0(phi: f64) -> f64 {
    let q = phi * phi - 1.0;
    0.25 * q * q
}

#[inline]
pub(crate) fn w1(phi: f64) -> f64 {
    phi * phi * phi - phi
}

#[inline]
pub(crate) fn w2(phi: f64) -> f64 {
    3.0 * phi * phi - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_values() {
        assert_eq!(double_well(0.0, 0).unwrap(), 0.25);
        assert_eq!(double_well(1.0, 0).unwrap(), 0.0);
        assert_eq!(double_well(-1.0, 0).unwrap(), 0.0);
        assert_eq!(double_well(0.0, 1).unwrap(), 0.0);
        assert_eq!(double_well(1.0, 1).unwrap(), 0.0);
        assert_eq!(double_well(-1.0, 1).unwrap(), 0.0);
        assert_eq!(double_well(1.0, 2).unwrap(), 2.0);
        assert_eq!(double_well(-1.0, 2).unwrap(), 2.0);
        assert_eq!(double_well(0.3, 4).unwrap(), 6.0);
        assert_eq!(double_well(0.3, 5).unwrap(), 0.0);
        assert!(double_well(0.0, 6).is_err());
    }
}
