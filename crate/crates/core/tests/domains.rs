use heisenberg_osc::domains::{Domain, DomainSpec, Rect};
use proptest::prelude::*;

const SPECS: [&str; 6] = ["flat:theta=0,offset=0.1", "lift:phi0=abs,a=0.5", "lift:phi0=sin,a=0.5", "holder:H=1,tau=0.5", "holder:H=0.5,tau=1", "plift:a=0.5,eps=0.2"];

fn graph(spec: &str) -> heisenberg_osc::domains::IntrinsicGraph {
    spec.parse::<DomainSpec>().unwrap().graph().unwrap()
}

proptest! {
    #[test]
    fn graph_map_lands_on_graph(k in 0usize..6, y in -3.0f64..3.0, t in -3.0f64..3.0) {
        let g = graph(SPECS[k]);
        let p = g.graph_map(y, t);
        let (y2, t2) = g.parameter(p);
        prop_assert!((y2 - y).abs() <= 1e-9 && (t2 - t).abs() <= 1e-9);
        // the round trip perturbs t by rounding, so compare against φ rather than `on_graph`
        prop_assert!((p.x - g.phi(y2, t2)).abs() <= 1e-8);
    }

    #[test]
    fn points_off_graph_are_on_exactly_one_side(k in 0usize..6, y in -3.0f64..3.0, t in -3.0f64..3.0, h in 1e-3f64..2.0) {
        let g = graph(SPECS[k]);
        let base = g.graph_map(y, t);
        let normal = heisenberg_osc::Point::new(h, 0.0, 0.0);
        let up = base.mul(normal);
        let down = base.mul(normal.inv());
        prop_assert!(g.contains(up) != g.contains(down));
        prop_assert_eq!(g.below(up), !g.contains(up));
    }

    #[test]
    fn lift_is_constant_along_vertical_lines(y in -3.0f64..3.0, t in -3.0f64..3.0, s in -5.0f64..5.0) {
        let g = graph("lift:phi0=abs,a=0.5");
        prop_assert_eq!(g.phi(y, t), g.phi(y, t + s));
    }

    #[test]
    fn holder_quotients_respect_the_constant(tau in 0.1f64..1.0, y in -2.0f64..2.0, t in -4.0f64..4.0, s in -4.0f64..4.0) {
        prop_assume!((t - s).abs() > 1e-6);
        let spec = DomainSpec::Holder { h: 1.0, tau };
        let g = spec.graph().unwrap();
        let meta = g.holder.as_ref().unwrap();
        let d = (t - s).abs();
        let e = if d <= 1.0 { 0.5 * (1.0 + tau) } else { 0.5 * (1.0 - tau) };
        let q = (g.phi(y, t) - g.phi(y, s)).abs() / d.powf(e);
        prop_assert!(q <= meta.constant * (1.0 + 1e-9), "quotient {} > {}", q, meta.constant);
    }

    #[test]
    fn spec_display_round_trips(k in 0usize..6) {
        let spec: DomainSpec = SPECS[k].parse().unwrap();
        let again: DomainSpec = spec.to_string().parse().unwrap();
        prop_assert_eq!(spec, again);
    }
}

#[test]
fn parser_accepts_aliases_and_rejects_garbage() {
    assert_eq!("flat:θ=0".parse::<DomainSpec>().unwrap(), DomainSpec::Flat { theta: 0.0, offset: 0.0 });
    assert_eq!("slab:t>0".parse::<DomainSpec>().unwrap(), DomainSpec::Slab { level: 0.0 });
    assert!(matches!("holder:H=1,τ=0.25".parse::<DomainSpec>().unwrap(), DomainSpec::Holder { tau, .. } if tau == 0.25));
    for bad in ["sphere:r=1", "holder:tau=0", "holder:tau=1.5", "lift:a=2", "lift:phi0=cos", "flat:theta=x", "flat:foo=1", "slab:t<0", "holder:H=-1"] {
        assert!(bad.parse::<DomainSpec>().is_err(), "{bad} should be rejected");
    }
}

#[test]
fn surface_sample_area_matches_rect_for_flat_plane() {
    let g = graph("flat:theta=0");
    let rect = Rect::new(-1.0, 1.0, -0.5, 0.5).unwrap();
    let s = g.surface_sample(rect, 10_000, 3).unwrap();
    assert!((s.total_weight() - rect.area()).abs() < 1e-9);
}

#[test]
fn slab_is_not_a_graph() {
    let spec: DomainSpec = "slab:t>1".parse().unwrap();
    assert!(!spec.is_graph());
    assert!(spec.graph().is_none());
    assert!(spec.domain().contains(heisenberg_osc::Point::new(0.0, 0.0, 2.0)));
}
