use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use torus_mhd::experiments::{read_ndjson, write_ndjson, DiagnosticsRecord, FieldExpr, Snapshot};
use torus_mhd::fields::{
    eval_field, leray_project, sobolev_norm, stream_function, Fft2, SpectralField2D, TaylorSpec, TorusGrid,
    VectorSpectrum,
};
use torus_mhd::solver::MHDState;
use torus_mhd::topology::{signatures_equivalent, Equivalence, TopologySignature};

const M: usize = 16;

fn grid() -> TorusGrid {
    TorusGrid::new(M).unwrap()
}

fn samples() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(-1.0f64..1.0, M * M),
        prop::collection::vec(-1.0f64..1.0, M * M),
    )
}

/// Spectrum of arbitrary real grid data (not divergence-free).
fn raw(v: &(Vec<f64>, Vec<f64>)) -> VectorSpectrum {
    VectorSpectrum::from_grid_values(grid(), &Fft2::new(M), &v.0, &v.1)
}

fn field(v: &(Vec<f64>, Vec<f64>)) -> SpectralField2D {
    leray_project(&raw(v))
}

fn dot(a: &VectorSpectrum, b: &VectorSpectrum) -> Complex64 {
    (0..2)
        .flat_map(|c| a.component(c).iter().zip(b.component(c)))
        .map(|(x, y)| x * y.conj())
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval(v in samples()) {
        let f = field(&v);
        let [g1, g2] = f.to_grid(&Fft2::new(M));
        let h = 2.0 * PI / M as f64;
        let grid_sq: f64 = g1.iter().chain(&g2).map(|x| x * x).sum::<f64>() * h * h;
        let spec_sq = f.l2_norm().powi(2);
        prop_assert!((grid_sq - spec_sq).abs() <= 1e-12 * spec_sq.max(1.0));
        prop_assert!((sobolev_norm(&f, 0) - f.l2_norm()).abs() <= 1e-14 * spec_sq.sqrt().max(1.0));
    }

    #[test]
    fn leray_is_an_orthogonal_projection(a in samples(), b in samples()) {
        let (ra, rb) = (raw(&a), raw(&b));
        let pa = leray_project(&ra);
        let again = leray_project(pa.spectrum());
        prop_assert!(again.sub(&pa).l2_norm() <= 1e-14 * pa.l2_norm().max(1e-300));
        prop_assert!(pa.spectrum().max_divergence() < 1e-12);
        let lhs = dot(pa.spectrum(), &rb);
        let rhs = dot(&ra, leray_project(&rb).spectrum());
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn stream_function_inverts_perp_gradient(v in samples()) {
        let f = field(&v);
        let back = stream_function(&f).perp_gradient();
        let err = back.sub(&f).l2_norm();
        prop_assert!(err <= 1e-13 * (1.0 + f.l2_norm()));
    }

    #[test]
    fn spectral_field_matches_pointwise_synthesis(v in samples(), x in 0.0..2.0 * PI, y in 0.0..2.0 * PI) {
        let f = field(&v);
        let g = f.grid();
        let mut want = [0.0, 0.0];
        for i in 0..g.len() {
            let (k1, k2) = g.mode(i);
            let e = Complex64::from_polar(1.0, k1 as f64 * x + k2 as f64 * y);
            for c in 0..2 {
                want[c] += (f.component(c)[i] * e).re;
            }
        }
        let got = eval_field(&f, [x, y]);
        prop_assert!((got[0] - want[0]).abs() < 1e-12 && (got[1] - want[1]).abs() < 1e-12);
    }

    #[test]
    fn snapshot_round_trip(a in samples(), b in samples(), t in 0.0..10.0f64, nu in 0.0..1.0f64) {
        let state = MHDState::new(field(&a), field(&b), t).unwrap();
        let snap = Snapshot::from_state(&state, nu, 0.5 * nu);
        let mut buf = Vec::new();
        snap.write_to(&mut buf).unwrap();
        let back = Snapshot::read_from(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(&back, &snap);
        prop_assert_eq!(back.to_state().unwrap(), state);
    }

    #[test]
    fn ndjson_round_trip(
        rows in prop::collection::vec(
            (any::<u32>(), 0.0..1e3f64, any::<f64>().prop_filter("finite", |x| x.is_finite()),
             prop::collection::vec(0.0..1e300f64, 1..5), any::<bool>()),
            0..6,
        )
    ) {
        let records: Vec<DiagnosticsRecord> = rows
            .iter()
            .enumerate()
            .map(|(i, (s, t, h, norms, sig))| DiagnosticsRecord {
                step: *s as usize,
                t: t + i as f64,
                u_l2_sq: norms[0],
                b_l2_sq: norms[norms.len() - 1],
                cross_helicity: *h,
                sobolev: BTreeMap::from([("b".to_string(), norms.clone())]),
                signature: sig.then(|| TopologySignature { n_saddles: 2, n_centers: 2, structurally_stable: true, ..Default::default() }),
            })
            .collect();
        let mut buf = Vec::new();
        write_ndjson(&records, &mut buf).unwrap();
        prop_assert_eq!(buf.iter().filter(|&&c| c == b'\n').count(), records.len());
        prop_assert_eq!(read_ndjson(buf.as_slice()).unwrap(), records);
    }

    #[test]
    fn signature_comparison_is_symmetric(
        a in (0usize..6, 0usize..6, 0usize..3, 0usize..4, 0usize..4, any::<bool>()),
        b in (0usize..6, 0usize..6, 0usize..3, 0usize..4, 0usize..4, any::<bool>()),
    ) {
        let mk = |s: (usize, usize, usize, usize, usize, bool)| TopologySignature {
            n_saddles: s.0,
            n_centers: s.1,
            n_degenerate: s.2,
            hetero_connections: s.3,
            self_connections: s.4,
            structurally_stable: s.5,
        };
        let (x, y) = (mk(a), mk(b));
        prop_assert_eq!(signatures_equivalent(&x, &y), signatures_equivalent(&y, &x));
        prop_assert_eq!(signatures_equivalent(&x, &x), Equivalence::Indistinguishable);
    }

    #[test]
    fn field_expressions_reparse(
        terms in prop::collection::vec((-5.0f64..5.0, 1u32..4, 1u32..4, any::<bool>()), 1..4)
    ) {
        let text = terms
            .iter()
            .map(|(c, n, m, tilde)| if *tilde { format!("{c}*tilde1") } else { format!("{c}*taylor:{n},{m}") })
            .collect::<Vec<_>>()
            .join(" + ");
        let e: FieldExpr = text.parse().unwrap();
        let again: FieldExpr = e.to_string().parse().unwrap();
        prop_assert_eq!(&again, &e);
        let g = TorusGrid::new(8).unwrap();
        prop_assert_eq!(again.build(g).unwrap(), e.build(g).unwrap());
    }
}

#[test]
fn taylor_fields_are_resolvable_only_below_nyquist() {
    let g = TorusGrid::new(8).unwrap();
    assert!(torus_mhd::fields::make_taylor(TaylorSpec::new(3, 3).unwrap(), 1.0, g).is_ok());
    assert!(torus_mhd::fields::make_taylor(TaylorSpec::new(4, 1).unwrap(), 1.0, g).is_err());
}
