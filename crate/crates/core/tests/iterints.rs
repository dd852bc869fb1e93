use std::f64::consts::PI;

use twistor_core::algebra::Word;
use twistor_core::iterints::*;
use twistor_core::potential::{forms_at, ModuliConfig};
use twistor_core::sample::Sampler;
use twistor_core::{Complex64, Error};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn diag_config() -> ModuliConfig {
    let p = Complex64::from_polar(1.0, PI / 4.0);
    ModuliConfig::new(p, Complex64::new(1.0, 0.0), Complex64::new(0.3, 0.2)).unwrap()
}

#[test]
fn anchors_at_symmetric_point() {
    let cfg = diag_config();
    let pair = OmegaPair::new(&cfg, 3).unwrap();
    for r in easy_anchor_residuals(&pair) {
        assert!(r < 1e-10, "{r}");
    }
    let l2 = 2f64.ln();
    assert!((pair.one.at(&[2, 1]) + PI * I * l2).norm() < 1e-9);
    assert!((pair.i.at(&[3, 1]) - PI * I * l2).norm() < 1e-9);
    assert!((pair.one.at(&[3, 3, 3]) + I * PI.powi(3) / 6.0).norm() < 1e-9);
    // symmetric-point relations between the two endpoints
    assert!((pair.i.at(&[3, 1]) + pair.one.at(&[2, 1])).norm() < 1e-9);
    assert!((pair.i.at(&[3, 2]) + pair.one.at(&[2, 3])).norm() < 1e-9);
}

#[test]
fn closed_forms_at_symmetric_point() {
    let cfg = diag_config();
    let l2 = 2f64.ln();
    let a = omega_closed(&cfg, ClosedKey::Omega21AtOne).unwrap();
    let b = omega_closed(&cfg, ClosedKey::Omega31AtI).unwrap();
    assert!((a + PI * I * l2).norm() < 1e-14);
    assert!((b - PI * I * l2).norm() < 1e-14);
}

#[test]
fn closed_forms_random_p() {
    let mut s = Sampler::new(11);
    for _ in 0..5 {
        let cfg = ModuliConfig::new(s.p(), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        let pair = OmegaPair::new(&cfg, 2).unwrap();
        let a = omega_closed(&cfg, ClosedKey::Omega21AtOne).unwrap();
        let b = omega_closed(&cfg, ClosedKey::Omega31AtI).unwrap();
        assert!((pair.one.at(&[2, 1]) - a).norm() < 1e-9);
        assert!((pair.i.at(&[3, 1]) - b).norm() < 1e-9);
        assert!((a.im / (2.0 * PI) - ell_s(&cfg)).abs() < 1e-12);
        assert!((-b.im / (2.0 * PI) - ell_c(&cfg)).abs() < 1e-12);
        let id = pair.one.at(&[2, 3]) + pair.i.at(&[3, 2]) - pair.one.at(&[2, 1]) - pair.i.at(&[3, 1]);
        assert!(id.norm() < 1e-8);
    }
}

#[test]
fn shuffle_and_diagonal_words() {
    let mut s = Sampler::new(12);
    let cfg = ModuliConfig::new(s.p(), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
    let t = omega_table(&cfg, Endpoint::I, 3).unwrap();
    let r = shuffle_residual(&t).unwrap();
    assert!(r.depth2 < 1e-9 && r.depth3.unwrap() < 1e-8, "{r:?}");
    for j in 1..=3u8 {
        assert!((t.at(&[j, j]) - t.at(&[j]).powi(2) / 2.0).norm() < 1e-9);
    }
}

// Nested Gauss-Legendre quadrature of depth-2 and depth-3 words using the
// closed-form depth-1 primitive; independent of the ODE formulation.
fn gl_nodes() -> Vec<(f64, f64)> {
    // 10-point rule on [0,1]
    let x = [
        0.148_874_338_981_631_2,
        0.433_395_394_129_247_2,
        0.679_409_568_299_024_4,
        0.865_063_366_688_984_5,
        0.973_906_528_517_171_7,
    ];
    let w = [
        0.295_524_224_714_752_9,
        0.269_266_719_309_996_4,
        0.219_086_362_515_982,
        0.149_451_349_150_580_6,
        0.066_671_344_308_688_1,
    ];
    let mut out = Vec::new();
    for k in 0..5 {
        out.push((0.5 - 0.5 * x[k], 0.5 * w[k]));
        out.push((0.5 + 0.5 * x[k], 0.5 * w[k]));
    }
    out
}

fn composite(a: f64, b: f64, panels: usize, f: &dyn Fn(f64) -> Complex64) -> Complex64 {
    let nodes = gl_nodes();
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let lo = a + h * k as f64;
        for &(x, w) in &nodes {
            acc += f(lo + h * x) * (w * h);
        }
    }
    acc
}

#[test]
fn nested_quadrature_oracle() {
    let cfg = ModuliConfig::new(Complex64::new(0.8, 1.3), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
    let pts = cfg.punctures();
    let end = I;
    let table = omega_table(&cfg, Endpoint::I, 3).unwrap();
    let signs = twistor_core::potential::FORM_SIGNS;
    let depth1 = |j: usize, z: Complex64| -> Complex64 { (0..4).map(|k| (1.0 - z / pts[k]).ln() * signs[j][k]).sum() };
    let form = |j: usize, s: f64| forms_at(&pts, end * s)[j] * end;
    for j in 0..3 {
        for k in 0..3 {
            let q = composite(0.0, 1.0, 64, &|s| depth1(j, end * s) * form(k, s));
            let w = Word::new(vec![j as u8 + 1, k as u8 + 1]).unwrap();
            assert!((q - table.get(&w)).norm() < 1e-10, "{w}: {q} vs {}", table.get(&w));
        }
    }
    // depth 3 via inner composite quadrature of the depth-2 integrand
    let depth2 = |j: usize, k: usize, s: f64| composite(0.0, s, 16, &|r| depth1(j, end * r) * form(k, r));
    for w in [[0usize, 1, 2], [2, 0, 0], [1, 1, 2]] {
        let q = composite(0.0, 1.0, 24, &|s| depth2(w[0], w[1], s) * form(w[2], s));
        let word = Word::new(w.iter().map(|&l| l as u8 + 1).collect::<Vec<_>>()).unwrap();
        assert!((q - table.get(&word)).norm() < 1e-9, "{word}");
    }
}

#[test]
fn tolerance_halving_is_consistent() {
    let cfg = diag_config();
    let a = omega_table_with_tol(&cfg, Endpoint::One, 3, 1e-11).unwrap();
    let b = omega_table_with_tol(&cfg, Endpoint::One, 3, 5e-12).unwrap();
    for (w, v, e) in a.entries() {
        assert!((v - b.get(&w)).norm() <= 10.0 * e.max(1e-15), "{w}");
    }
}

#[test]
fn guards() {
    let cfg = diag_config();
    assert_eq!(omega_table(&cfg, Endpoint::One, 7), Err(Error::DepthCap(7)));
    let close =
        ModuliConfig::new(Complex64::new(1.0, 0.02), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
    assert!(matches!(omega_table(&close, Endpoint::One, 2), Err(Error::PathSingularity { .. })));
}

#[test]
fn json_dump_lists_every_word() {
    let cfg = diag_config();
    let t = omega_table(&cfg, Endpoint::One, 2).unwrap();
    let j = t.to_json();
    assert_eq!(j["entries"].as_array().unwrap().len(), 12);
    assert_eq!(j["endpoint"], "1");
    assert_eq!(j["entries"][3]["word"], "11");
}
