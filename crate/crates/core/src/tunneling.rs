//! Orthodox-theory tunneling rate used by the optional stochastic mode.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::math::ln;
use crate::{Error, Result};

/// Parameters of stochastic (rate-law) tunneling.
///
/// `tunnel_resistance` is the junction tunnel resistance in units of the
/// series resistance, `temperature` is `kT / (e^2/C)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StochasticTunneling {
    pub tunnel_resistance: f64,
    pub temperature: f64,
    pub seed: u64,
}

impl StochasticTunneling {
    pub fn validate(&self) -> Result<()> {
        if !(self.tunnel_resistance > 0.0) {
            return Err(Error::invalid("tunnel resistance must be > 0"));
        }
        if !(self.temperature >= 0.0) {
            return Err(Error::invalid("temperature must be >= 0"));
        }
        Ok(())
    }

    /// Tunneling rate for an energy gain `de = v - v_th` (normalized).
    ///
    /// `de / (r_t (1 - exp(-de/theta)))`, with the `theta -> 0` limit
    /// `max(de, 0) / r_t` and the `de -> 0` limit `theta / r_t`.
    pub fn rate(&self, de: f64) -> f64 {
        let theta = self.temperature;
        let rt = self.tunnel_resistance;
        if theta == 0.0 {
            return if de > 0.0 { de / rt } else { 0.0 };
        }
        let x = de / theta;
        if x.abs() < 1e-8 {
            return theta * (1.0 + 0.5 * x) / rt;
        }
        // -expm1(-x) keeps precision for small |x|.
        let denom = -libm::expm1(-x);
        if denom == 0.0 || !denom.is_finite() {
            return 0.0;
        }
        let r = de / (rt * denom);
        if r.is_finite() && r > 0.0 {
            r
        } else {
            0.0
        }
    }
}

/// Accumulates integrated hazard and fires whenever it passes an
/// exponentially distributed target drawn from a seeded generator.
#[derive(Debug, Clone)]
pub(crate) struct HazardClock {
    rng: ChaCha8Rng,
    accumulated: f64,
    target: f64,
}

impl HazardClock {
    pub(crate) fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let target = unit_exponential(&mut rng);
        HazardClock {
            rng,
            accumulated: 0.0,
            target,
        }
    }

    /// Adds `hazard` and returns how many firings it triggers.
    pub(crate) fn advance(&mut self, hazard: f64) -> usize {
        self.accumulated += hazard;
        let mut fired = 0;
        while self.accumulated >= self.target {
            self.accumulated -= self.target;
            self.target = unit_exponential(&mut self.rng);
            fired += 1;
            if fired > crate::element::MAX_EVENTS_PER_STEP {
                break;
            }
        }
        fired
    }
}

fn unit_exponential(rng: &mut ChaCha8Rng) -> f64 {
    // u in (0, 1]
    let u = ((rng.next_u64() >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64);
    -ln(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(theta: f64) -> StochasticTunneling {
        StochasticTunneling {
            tunnel_resistance: 2.0,
            temperature: theta,
            seed: 1,
        }
    }

    #[test]
    fn zero_temperature_is_a_ramp() {
        let p = params(0.0);
        assert_eq!(p.rate(-0.3), 0.0);
        assert!((p.rate(0.4) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn rate_is_continuous_through_zero() {
        let p = params(0.05);
        let at0 = p.rate(0.0);
        assert!((at0 - 0.025).abs() < 1e-12);
        assert!((p.rate(1e-7) - at0).abs() < 1e-6);
        assert!((p.rate(-1e-7) - at0).abs() < 1e-6);
    }

    #[test]
    fn hazard_clock_is_reproducible() {
        let mut a = HazardClock::new(7);
        let mut b = HazardClock::new(7);
        for _ in 0..1000 {
            assert_eq!(a.advance(0.01), b.advance(0.01));
        }
    }
}
