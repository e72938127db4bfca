use grievlex::inferstats::{jzs_bayes_factor, TDesign, DEFAULT_BF_SCALE};

fn design(kind: &str, n: usize) -> TDesign {
    match kind {
        "two" => TDesign::TwoSample { na: n, nb: n },
        "one" => TDesign::OneSample { n },
        other => panic!("unknown design {other}"),
    }
}

fn oracle() -> Vec<(String, usize, f64, f64)> {
    include_str!("data/jzs_oracle.tsv")
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (
                f[0].to_string(),
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
                f[3].parse().unwrap(),
            )
        })
        .collect()
}

#[test]
fn matches_effect_size_quadrature_oracle() {
    let rows = oracle();
    assert_eq!(rows.len(), 78);
    let mut worst = 0.0f64;
    for (kind, n, t, expected) in rows {
        let bf = jzs_bayes_factor(t, design(&kind, n), DEFAULT_BF_SCALE).unwrap();
        let rel = (bf.bf10 / expected - 1.0).abs();
        worst = worst.max(rel);
        assert!(rel < 1e-6, "{kind} n={n} t={t}: {} vs {expected}", bf.bf10);
    }
    eprintln!("worst relative error {worst:e}");
}

#[test]
fn t3_two_groups_of_50() {
    let expected = oracle()
        .into_iter()
        .find(|r| r.0 == "two" && r.1 == 50 && r.2 == 3.0)
        .unwrap()
        .3;
    let bf =
        jzs_bayes_factor(3.0, TDesign::TwoSample { na: 50, nb: 50 }, DEFAULT_BF_SCALE).unwrap();
    assert_eq!(format!("{:.3e}", bf.bf10), format!("{expected:.3e}"));
}

#[test]
fn increases_with_abs_t() {
    for kind in ["two", "one"] {
        for n in [10, 50, 200] {
            let mut prev = 0.0;
            for i in 0..=60 {
                let t = i as f64 * 0.1;
                let bf = jzs_bayes_factor(-t, design(kind, n), DEFAULT_BF_SCALE)
                    .unwrap()
                    .bf10;
                if i == 0 {
                    assert!(bf < 1.0);
                } else {
                    assert!(bf > prev, "{kind} n={n} t={t}");
                }
                prev = bf;
            }
        }
    }
}

#[test]
fn wider_prior_penalises_null_more() {
    let d = TDesign::TwoSample { na: 30, nb: 30 };
    let narrow = jzs_bayes_factor(0.0, d, 0.5).unwrap().bf10;
    let wide = jzs_bayes_factor(0.0, d, 1.0).unwrap().bf10;
    assert!(wide < narrow);
}
