//! Closed-form reference solutions, forces and bound shapes.
//!
//! Every bound shape here sets the unquantified constants to one; callers
//! compare rates or ratios against them, never pointwise values.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::fields::{
    advect, make_taylor, sobolev_norm, Fft2, SpectralField2D, TaylorMode, TaylorSpec, TorusGrid,
    VectorSpectrum,
};
use crate::solver::MHDState;

/// Unforced exact solution `(0, A e^{-eta N^2 t} T_nm)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayingTaylorOracle {
    pub spec: TaylorSpec,
    pub eta: f64,
    pub amplitude: f64,
}

impl DecayingTaylorOracle {
    /// The reference amplitude `1/N` used by the perturbative construction.
    pub fn with_inverse_norm(spec: TaylorSpec, eta: f64) -> Self {
        Self {
            spec,
            eta,
            amplitude: 1.0 / spec.norm(),
        }
    }

    pub fn magnetic_amplitude(&self, t: f64) -> f64 {
        self.amplitude * (-self.eta * self.spec.eigenvalue() * t).exp()
    }
}

pub fn decaying_taylor(oracle: &DecayingTaylorOracle, t: f64, grid: TorusGrid) -> Result<MHDState> {
    if t < 0.0 {
        return Err(Error::Input(format!("oracle time must be >= 0, got {t}")));
    }
    let b = make_taylor(oracle.spec, oracle.magnetic_amplitude(t), grid)?;
    Ok(MHDState {
        u: SpectralField2D::zeros(grid),
        b,
        t,
    })
}

/// Explicit forced solution `(0, b)` with
/// `b(t) = c1(t) T_nm + c2(t) T_target`,
/// `c1 = e^{-eta N^2 t}`, `c2 = (1 - e^{-eta L t}) / (eta L)`, where `L` is
/// the eigenvalue of the target mode. The magnetic force is `T_target` and
/// the velocity force is `f1 = -c1 c2 [(T_nm.grad) T_target + (T_target.grad) T_nm]`.
///
/// The velocity force uses the product of the actual coefficients of `b`.
/// For a `T_{N2}` target this differs from the time factor
/// `e^{-eta N^2 t} (1 - e^{-eta t}) / eta` unless `N2 = 1`.
#[derive(Debug)]
pub struct ForcedOracle {
    pub base: TaylorSpec,
    pub target: TaylorMode,
    pub eta: f64,
    grid: TorusGrid,
    cross: OnceLock<VectorSpectrum>,
}

impl Clone for ForcedOracle {
    fn clone(&self) -> Self {
        let cross = OnceLock::new();
        if let Some(c) = self.cross.get() {
            let _ = cross.set(c.clone());
        }
        Self {
            base: self.base,
            target: self.target,
            eta: self.eta,
            grid: self.grid,
            cross,
        }
    }
}

impl ForcedOracle {
    pub fn new(base: TaylorSpec, target: TaylorMode, eta: f64, grid: TorusGrid) -> Result<Self> {
        if !(eta > 0.0) {
            return Err(Error::Config("forced oracle needs eta > 0".into()));
        }
        if target.eigenvalue() >= base.eigenvalue() {
            return Err(Error::Config(format!(
                "forced oracle needs the target eigenvalue {} below N^2 = {}",
                target.eigenvalue(),
                base.eigenvalue()
            )));
        }
        base.check_resolvable(grid)?;
        target.field(1.0, grid)?;
        Ok(Self {
            base,
            target,
            eta,
            grid,
            cross: OnceLock::new(),
        })
    }

    /// The oracle behind the theorem-2 forcing kind.
    pub fn theorem2(nm: TaylorSpec, n2: TaylorSpec, eta: f64, grid: TorusGrid) -> Result<Self> {
        Self::new(nm, n2.into(), eta, grid)
    }

    /// The oracle behind the remark-2 forcing kind.
    pub fn remark2(nm: TaylorSpec, eta: f64, grid: TorusGrid) -> Result<Self> {
        Self::new(nm, TaylorMode::Tilde1, eta, grid)
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn base_field(&self) -> SpectralField2D {
        make_taylor(self.base, 1.0, self.grid).expect("validated at construction")
    }

    pub fn target_field(&self) -> SpectralField2D {
        self.target.field(1.0, self.grid).expect("validated at construction")
    }

    pub fn base_coefficient(&self, t: f64) -> f64 {
        (-self.eta * self.base.eigenvalue() * t).exp()
    }

    pub fn target_coefficient(&self, t: f64) -> f64 {
        let l = self.eta * self.target.eigenvalue();
        -(-l * t).exp_m1() / l
    }

    /// `(T_nm.grad) T_target + (T_target.grad) T_nm`, computed on the grid
    /// once.
    pub fn cross_term(&self) -> &VectorSpectrum {
        self.cross.get_or_init(|| {
            let fft = Fft2::new(self.grid.resolution());
            let a = self.base_field();
            let c = self.target_field();
            let mut s = advect(&a, &c, &fft);
            s.axpy(1.0, &advect(&c, &a, &fft));
            s
        })
    }

    /// Scalar multiplying [`Self::cross_term`] in the velocity force.
    pub fn velocity_force_factor(&self, t: f64) -> f64 {
        -self.base_coefficient(t) * self.target_coefficient(t)
    }

    /// Time factor of the cross term as printed for the theorem-2
    /// construction, `e^{-eta N^2 t} (1 - e^{-eta t}) / eta`. Recorded for
    /// comparison only; the solver never uses it.
    pub fn printed_cross_factor(&self, t: f64) -> f64 {
        self.base_coefficient(t) * (-(-self.eta * t).exp_m1() / self.eta)
    }

    pub fn asymptotic_b(&self) -> SpectralField2D {
        self.target_field().scaled(1.0 / (self.eta * self.target.eigenvalue()))
    }
}

pub fn forced_exact_b(oracle: &ForcedOracle, t: f64) -> SpectralField2D {
    oracle
        .base_field()
        .combine(oracle.base_coefficient(t), &oracle.target_field(), oracle.target_coefficient(t))
}

/// Analytic `d b / dt` of [`forced_exact_b`].
pub fn forced_exact_b_dt(oracle: &ForcedOracle, t: f64) -> SpectralField2D {
    let l = oracle.eta * oracle.target.eigenvalue();
    oracle.base_field().combine(
        -oracle.eta * oracle.base.eigenvalue() * oracle.base_coefficient(t),
        &oracle.target_field(),
        (-l * t).exp(),
    )
}

/// Velocity force `f1(t)`; not divergence-free, but zero-average.
pub fn forcing_f1(oracle: &ForcedOracle, t: f64) -> VectorSpectrum {
    let mut out = VectorSpectrum::zeros(oracle.grid);
    out.axpy(oracle.velocity_force_factor(t), oracle.cross_term());
    out
}

/// Shape parameters of the H^r stability estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityBound {
    pub sigma: f64,
    pub r: u32,
    pub delta: f64,
    pub n: f64,
    pub gamma: f64,
}

impl StabilityBound {
    pub fn new(sigma: f64, r: u32, delta: f64, n: f64, gamma: f64, nu: f64, eta: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma < nu.min(eta)) {
            return Err(Error::Config(format!(
                "sigma must lie in (0, min(nu, eta)) = (0, {}), got {sigma}",
                nu.min(eta)
            )));
        }
        Ok(Self {
            sigma,
            r,
            delta,
            n,
            gamma,
        })
    }

    /// Default decay rate `0.9 min(nu, eta)`.
    pub fn default_sigma(nu: f64, eta: f64) -> f64 {
        0.9 * nu.min(eta)
    }
}

/// `delta^2 N^{2r} e^{-2 sigma t}`; the factor `e^{C Gamma / sigma^2}` is left out.
pub fn stability_envelope(bound: &StabilityBound, t: f64) -> f64 {
    bound.delta * bound.delta * bound.n.powi(2 * bound.r as i32) * (-2.0 * bound.sigma * t).exp()
}

/// Shapes of the two Duhamel bounds with unit constants:
/// `(delta^2 N^{r+3} e^{-sigma t}, delta N^{-2} + delta N^{r+1} e^{-eta N^2 t / 2})`.
pub fn duhamel_envelopes(delta: f64, n: f64, r: u32, eta: f64, sigma: f64, t: f64) -> (f64, f64) {
    let lh = delta * delta * n.powi(r as i32 + 3) * (-sigma * t).exp();
    let lm = delta * n.powi(-2) + delta * n.powi(r as i32 + 1) * (-eta * n * n * t / 2.0).exp();
    (lh, lm)
}

/// `eta (N^r e^{-eta N^2 T} + e^{-eta T})`, the printed bound on
/// `|eta b(T) - T~1|_{H^r}` for the `T~1`-forced construction.
pub fn remark2_error_bound(n: f64, r: u32, eta: f64, t: f64) -> f64 {
    eta * (n.powi(r as i32) * (-eta * n * n * t).exp() + (-eta * t).exp())
}

/// `|eta b(T) - T~1|_{H^r}` from the closed form
/// `eta b(T) - T~1 = eta e^{-eta N^2 T} T_nm - e^{-eta T} T~1`.
pub fn remark2_exact_error(nm: TaylorSpec, r: u32, eta: f64, t: f64, grid: TorusGrid) -> Result<f64> {
    let oracle = ForcedOracle::remark2(nm, eta, grid)?;
    let diff = forced_exact_b(&oracle, t)
        .scaled(eta)
        .sub(&oracle.target_field());
    Ok(sobolev_norm(&diff, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_tilde_t1;
    use crate::solver::nonlinear_rhs;

    fn grid() -> TorusGrid {
        TorusGrid::new(32).unwrap()
    }

    fn t(n: u32, m: u32) -> TaylorSpec {
        TaylorSpec::new(n, m).unwrap()
    }

    #[test]
    fn decaying_taylor_halves() {
        let o = DecayingTaylorOracle {
            spec: t(2, 1),
            eta: 0.3,
            amplitude: 2.0,
        };
        let s0 = decaying_taylor(&o, 0.0, grid()).unwrap();
        assert_eq!(s0.b, make_taylor(t(2, 1), 2.0, grid()).unwrap());
        assert!(s0.u.is_zero());
        let th = 2f64.ln() / (0.3 * 5.0);
        let s = decaying_taylor(&o, th, grid()).unwrap();
        assert!((s.b.l2_norm() / s0.b.l2_norm() - 0.5).abs() < 1e-14);
        let (du, db) = nonlinear_rhs(&s, true);
        assert!(du.max_coeff() < 1e-10 && db.max_coeff() < 1e-10);
    }

    #[test]
    fn forced_closed_form_limits() {
        let o = ForcedOracle::theorem2(t(4, 4), t(1, 1), 0.5, grid()).unwrap();
        assert_eq!(forced_exact_b(&o, 0.0), o.base_field());
        let late = forced_exact_b(&o, 200.0);
        assert!(late.sub(&o.asymptotic_b()).max_coeff() < 1e-14);
        assert_eq!(forcing_f1(&o, 0.0).l2_norm(), 0.0);
    }

    #[test]
    fn forced_heat_residual() {
        let o = ForcedOracle::theorem2(t(4, 4), t(1, 2), 0.7, grid()).unwrap();
        for &s in &[0.0, 0.1, 0.5, 1.3] {
            let b = forced_exact_b(&o, s);
            let res = forced_exact_b_dt(&o, s)
                .sub(&b.laplacian().scaled(o.eta))
                .sub(&o.target_field());
            assert!(res.max_coeff() < 1e-10);
        }
        // the analytic derivative agrees with a centered difference
        let h = 1e-5;
        let fd = forced_exact_b(&o, 0.4 + h)
            .sub(&forced_exact_b(&o, 0.4 - h))
            .scaled(0.5 / h);
        assert!(fd.sub(&forced_exact_b_dt(&o, 0.4)).max_coeff() < 1e-8);
    }

    #[test]
    fn f1_has_zero_mean() {
        let o = ForcedOracle::theorem2(t(3, 2), t(1, 1), 0.5, grid()).unwrap();
        let f = forcing_f1(&o, 0.8);
        assert!(f.coeff(0, 0)[0].norm() < 1e-14 && f.coeff(0, 0)[1].norm() < 1e-14);
        assert!(f.l2_norm() > 0.0);
    }

    #[test]
    fn printed_factor_matches_only_for_unit_target() {
        let g = grid();
        let a = ForcedOracle::remark2(t(2, 2), 0.5, g).unwrap();
        for &s in &[0.3, 1.0] {
            assert!((a.printed_cross_factor(s) + a.velocity_force_factor(s)).abs() < 1e-15);
        }
        let b = ForcedOracle::theorem2(t(2, 2), t(1, 1), 0.5, g).unwrap();
        assert!((b.printed_cross_factor(1.0) + b.velocity_force_factor(1.0)).abs() > 1e-3);
    }

    #[test]
    fn envelope_laws() {
        let b = StabilityBound::new(0.45, 3, 1e-3, 32f64.sqrt(), 1.0, 0.5, 0.5).unwrap();
        let e0 = stability_envelope(&b, 0.0);
        assert!((e0 - 1e-6 * 32f64.powi(3)).abs() < 1e-18 * 1e6);
        let r = stability_envelope(&b, 2.0) / stability_envelope(&b, 0.5);
        assert!((r - (-2.0 * 0.45 * 1.5f64).exp()).abs() < 1e-14);
        let b2 = StabilityBound { n: 2.0 * b.n, ..b };
        assert!((stability_envelope(&b2, 1.0) / stability_envelope(&b, 1.0) - 64.0).abs() < 1e-12);
        assert!(StabilityBound::new(0.5, 3, 1e-3, 2.0, 1.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn duhamel_envelope_shapes() {
        let (n, d, r) = (4.0, 1e-3, 3);
        let (_, lm0) = duhamel_envelopes(d, n, r, 0.5, 0.45, 0.0);
        assert!((lm0 - (d / 16.0 + d * 256.0)).abs() < 1e-15);
        let (_, lminf) = duhamel_envelopes(d, n, r, 0.5, 0.45, 1e3);
        assert!((lminf - d / 16.0).abs() < 1e-18);
        let (lh, _) = duhamel_envelopes(d, n, r, 0.5, 0.45, 0.7);
        let (lh2, _) = duhamel_envelopes(d / 2.0, n, r, 0.5, 0.45, 0.7);
        assert!((lh / lh2 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn remark2_bound_shape() {
        let n = 32f64.sqrt();
        let mut prev = f64::INFINITY;
        for &tt in &[0.5, 1.0, 2.0, 4.0, 8.0] {
            let b = remark2_error_bound(n, 3, 0.5, tt);
            assert!(b < prev);
            prev = b;
        }
        assert!(remark2_error_bound(n, 3, 0.5, 1e4) < 1e-300);
    }

    #[test]
    fn remark2_exact_error_closed_form() {
        // eta e^{-eta N^2 T} T_nm - e^{-eta T} T~1 has orthogonal parts
        let g = grid();
        let (eta, tt, r) = (0.5, 1.0, 3);
        let e = remark2_exact_error(t(4, 4), r, eta, tt, g).unwrap();
        let a = eta * (-eta * 32.0 * tt).exp() * sobolev_norm(&make_taylor(t(4, 4), 1.0, g).unwrap(), r);
        let c = (-eta * tt).exp() * sobolev_norm(&make_tilde_t1(g).unwrap(), r);
        assert!((e - a.hypot(c)).abs() < 1e-12 * e);
    }
}
