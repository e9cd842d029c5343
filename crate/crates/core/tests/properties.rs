use aolink::atmosphere::AtmosphereModel;
use aolink::budget::{strehl_ao, strehl_no_ao, AoSystemConfig, Scheme};
use aolink::channel::{eta_total, ChannelConstants};
use aolink::geometry::PassGeometry;
use aolink::numerics::{integrate, QuadratureSpec};
use aolink::qkd::{background_yield, gain, qber, QkdParams};
use aolink::scenario::{emit_csv, format_g, read_csv, Table, Value};
use proptest::prelude::*;

fn zenith() -> impl Strategy<Value = f64> {
    (0.0..75.0f64).prop_map(f64::to_radians)
}

fn altitude() -> impl Strategy<Value = f64> {
    2e5..1.5e6f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadrature_is_linear(alpha in -5.0..5.0f64, beta in -5.0..5.0f64, c in 0.1..3.0f64, b in 0.5..10.0f64) {
        let spec = QuadratureSpec::default();
        let f = |x: f64| (-c * x).exp();
        let g = |x: f64| (c * x).sin() * x.sqrt();
        let lhs = integrate(|x| alpha * f(x) + beta * g(x), 0.0, b, &spec).unwrap().value;
        let rhs = alpha * integrate(f, 0.0, b, &spec).unwrap().value + beta * integrate(g, 0.0, b, &spec).unwrap().value;
        let scale = alpha.abs() + beta.abs() + 1.0;
        prop_assert!((lhs - rhs).abs() <= 1e-9 * scale * b.max(1.0).powf(1.5));
    }

    #[test]
    fn strehl_bounded_and_decreasing(v in 0.0..50.0f64, dv in 1e-6..1.0f64) {
        let s = strehl_ao(v).unwrap();
        prop_assert!(s > 0.0 && s <= 1.0);
        prop_assert!(strehl_ao(v + dv).unwrap() < s);
    }

    #[test]
    fn uncorrected_strehl_improves_with_r0(d in 0.1..5.0f64, r0 in 0.01..1.0f64) {
        let s = strehl_no_ao(d, r0).unwrap();
        prop_assert!(s > 0.0 && s < 1.0);
        prop_assert!(strehl_no_ao(d, r0 * 1.1).unwrap() > s);
    }

    #[test]
    fn range_exceeds_altitude(h in altitude(), z in zenith()) {
        let g = PassGeometry::new(h, z).unwrap();
        prop_assert!(g.range() >= h * (1.0 - 1e-12));
        prop_assert!(g.range() <= h / z.cos() * (1.0 + 1e-12));
    }

    #[test]
    fn path_angle_slope_is_negative(h in prop::sample::select(vec![4e5, 8e5]), l in 0.0..5.0f64, zdeg in 0.0..74.0f64) {
        let diff = |deg: f64| {
            let b = PassGeometry::new(h, deg.to_radians()).unwrap().beam_angles(l, 500.0).unwrap();
            b.theta_t - b.theta_s
        };
        prop_assert!(diff(zdeg + 1.0) < diff(zdeg));
    }

    #[test]
    fn fried_parameter_scales_with_wavelength(l in 400e-9..1600e-9f64, z in zenith()) {
        let m = AtmosphereModel::default();
        let a = m.fried_r0(l, z, 4e5).unwrap();
        let b = m.fried_r0(2.0 * l, z, 4e5).unwrap();
        prop_assert!((b / a / 2f64.powf(1.2) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cn2_positive(h in 0.0..1e6f64) {
        prop_assert!(AtmosphereModel::default().cn2(h).unwrap() > 0.0);
    }

    #[test]
    fn efficiency_is_a_probability(h in altitude(), z in zenith(), s in 0.0..1.0f64) {
        let cfg = AoSystemConfig::new(Scheme::PureTdm);
        let g = PassGeometry::new(h, z).unwrap();
        let e = eta_total(&cfg, &g, s, &ChannelConstants::default()).unwrap();
        prop_assert!((0.0..=1.0).contains(&e.total));
        let far = PassGeometry::new(h, (z + 0.01).min(75f64.to_radians())).unwrap();
        prop_assert!(eta_total(&cfg, &far, s, &ChannelConstants::default()).unwrap().total <= e.total);
    }

    #[test]
    fn gain_and_qber_behave(eta in 0.0..1.0f64, deta in 1e-6..1e-2f64, y0 in 1e-9..1e-3f64, mu in 0.01..1.0f64) {
        let p = QkdParams::default();
        prop_assert!(gain(eta.min(1.0 - deta) + deta, mu, y0).unwrap() > gain(eta.min(1.0 - deta), mu, y0).unwrap());
        let e = qber(eta, mu, y0, &p).unwrap();
        prop_assert!((0.0..=0.5).contains(&e));
    }

    #[test]
    fn background_yield_is_affine(n in 0.0..1e-3f64, x in 0.0..1e-3f64) {
        let p = QkdParams::default();
        let y = |nb: f64| background_yield(nb, x, 0.36, &p).unwrap();
        let (a, b, c) = (y(0.0), y(n), y(2.0 * n));
        prop_assert!(((c - b) - (b - a)).abs() <= 1e-15 + 1e-12 * c);
    }

    #[test]
    fn nine_digit_format_round_trips(x in prop::num::f64::NORMAL) {
        let y: f64 = format_g(x).parse().unwrap();
        prop_assert!(((y - x) / x).abs() <= 5e-9);
        prop_assert_eq!(format_g(y), format_g(x));
    }

    #[test]
    fn csv_round_trip(values in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, 0..20)) {
        let mut t = Table::new(&["scheme", "value", "status"]);
        for v in &values {
            t.rows.push(vec![Value::Text("no_ao".into()), Value::Number(*v), Value::Text("ok".into())]);
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, emit_csv(&t)).unwrap();
        let back = read_csv(&path).unwrap();
        prop_assert_eq!(emit_csv(&back), emit_csv(&t));
        prop_assert_eq!(back.rows.len(), values.len());
    }
}
