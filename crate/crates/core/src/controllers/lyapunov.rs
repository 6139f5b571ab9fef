use crate::error::{Error, Result};

/// Upper bound on the time for `V` to reach zero under
/// `V̇ ≤ −θV − ρV^σ`, starting from `V(0) = v0`.
///
/// With `theta == 0` this is the classical finite-time bound
/// `V0^{1−σ} / (ρ(1−σ))`. For `theta > 0` the logarithmic form
/// `ln(θV0^{1−σ} + ρ/(θ(1−σ))) / (θ(1−σ))` is returned as it is usually
/// stated; note that it does not vanish at `V0 = 0`.
pub fn settling_time_bound(v0: f64, rho: f64, sigma: f64, theta: f64) -> Result<f64> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
    }
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::InvalidParameter(format!("sigma must lie in (0, 1), got {sigma}")));
    }
    if !(v0 >= 0.0 && v0.is_finite()) {
        return Err(Error::InvalidParameter(format!("V0 must be finite and >= 0, got {v0}")));
    }
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::InvalidParameter(format!("theta must be finite and >= 0, got {theta}")));
    }
    let e = 1.0 - sigma;
    if theta == 0.0 {
        Ok(v0.powf(e) / (rho * e))
    } else {
        Ok((theta * v0.powf(e) + rho / (theta * e)).ln() / (theta * e))
    }
}
