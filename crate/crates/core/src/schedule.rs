//! Time envelopes of the Zeeman field and the gated RF drive.

/// Field `B(t)` is constant at `b0` until `ramp_start`, then decays as
/// `b0·exp(-(t - ramp_start)/t0)`. The RF term is `h0·cos(ω t)` on global
/// simulation time while the gate is on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSchedule {
    pub b0: f64,
    pub t0: f64,
    pub ramp_start: f64,
    pub h0: f64,
    pub omega: f64,
}

impl Default for DriveSchedule {
    fn default() -> Self {
        Self {
            b0: 10.0,
            t0: 1e4,
            ramp_start: f64::INFINITY,
            h0: 1.0,
            omega: 5.0,
        }
    }
}

impl DriveSchedule {
    /// Constant field, no ramp.
    pub fn constant_field(b0: f64, h0: f64, omega: f64) -> Self {
        Self {
            b0,
            h0,
            omega,
            ..Self::default()
        }
    }

    pub fn field(&self, t: f64) -> f64 {
        if t <= self.ramp_start {
            self.b0
        } else {
            self.b0 * (-(t - self.ramp_start) / self.t0).exp()
        }
    }

    pub fn rf(&self, t: f64, gate: bool) -> f64 {
        if gate {
            self.h0 * (self.omega * t).cos()
        } else {
            0.0
        }
    }

    /// First time at which the field has decayed to `b_stop`.
    pub fn time_field_reaches(&self, b_stop: f64) -> f64 {
        if b_stop >= self.b0 {
            self.ramp_start
        } else {
            self.ramp_start + self.t0 * (self.b0 / b_stop).ln()
        }
    }

    /// Half an RF cycle, `π/ω`.
    pub fn half_period(&self) -> f64 {
        std::f64::consts::PI / self.omega
    }
}
