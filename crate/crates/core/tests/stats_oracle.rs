//! z and Welch t against values computed independently (high-precision
//! arithmetic for z, a reference statistics library for t).

use cellsort_core::stats::{normal_cdf, summarize, welch_t_test, z_test};

struct Case {
    a: Vec<f64>,
    b: Vec<f64>,
    z: f64,
    p_z: f64,
    t: f64,
    dof: f64,
    p_t: f64,
}

fn cases() -> Vec<Case> {
    let text = include_str!("data/stats_oracle.txt");
    let floats = |s: &str| -> Vec<f64> { s.split(',').map(|x| x.trim().parse().unwrap()).collect() };
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split('|').map(str::trim).collect();
            assert_eq!(f.len(), 7, "{l}");
            Case {
                a: floats(f[0]),
                b: floats(f[1]),
                z: f[2].parse().unwrap(),
                p_z: f[3].parse().unwrap(),
                t: f[4].parse().unwrap(),
                dof: f[5].parse().unwrap(),
                p_t: f[6].parse().unwrap(),
            }
        })
        .collect()
}

#[test]
fn twenty_pairs_match_to_1e9() {
    let cases = cases();
    assert_eq!(cases.len(), 20);
    for (i, c) in cases.iter().enumerate() {
        let z = z_test(&summarize(&c.a).unwrap(), &summarize(&c.b).unwrap());
        assert!((z.z - c.z).abs() <= 1e-9, "case {i}: z {} vs {}", z.z, c.z);
        assert!((z.p - c.p_z).abs() <= 1e-9, "case {i}: p_z {} vs {}", z.p, c.p_z);
        let t = welch_t_test(&c.a, &c.b).unwrap();
        assert!((t.t - c.t).abs() <= 1e-9, "case {i}: t {} vs {}", t.t, c.t);
        assert!((t.dof - c.dof).abs() <= 1e-9 * c.dof.max(1.0), "case {i}: dof {} vs {}", t.dof, c.dof);
        assert!((t.p - c.p_t).abs() <= 1e-9, "case {i}: p_t {} vs {}", t.p, c.p_t);
    }
}

#[test]
fn antisymmetry_and_scale() {
    for c in cases() {
        let (sa, sb) = (summarize(&c.a).unwrap(), summarize(&c.b).unwrap());
        let (ab, ba) = (z_test(&sa, &sb), z_test(&sb, &sa));
        assert_eq!(ab.z, -ba.z);
        assert_eq!(ab.p, ba.p);
        let k = 3.5;
        let scale = |v: &[f64]| v.iter().map(|x| x * k).collect::<Vec<_>>();
        let scaled = z_test(&summarize(&scale(&c.a)).unwrap(), &summarize(&scale(&c.b)).unwrap());
        assert!((scaled.z - ab.z).abs() < 1e-9);
    }
}

#[test]
fn normal_cdf_identities() {
    assert_eq!(normal_cdf(0.0), 0.5);
    let mut x = -40.0;
    while x <= 40.0 {
        assert!((normal_cdf(x) + normal_cdf(-x) - 1.0).abs() <= 1e-12, "x = {x}");
        x += 0.01;
    }
}
