//! The five subcommands. Each returns a JSON report, a CSV table and a verdict.

use std::f64::consts::PI;

use serde_json::{json, Value};
use twistor_core::deformation::{derive_with_diagnostics, first_order};
use twistor_core::geometry::{
    eh_metric, energy_first_closed, energy_second_symmetric, energy_series, energy_third_cone, identity_suite, nahc_t0,
    nahc_t0_inv, nilpotent_higgs, twisted_form_series, twisted_form_t0, twisted_form_third_cone, U, UB, V, VB,
};
use twistor_core::iterints::{easy_anchor_residuals, omega_closed, shuffle_residual, ClosedKey, OmegaPair};
use twistor_core::monodromy::{lambda_grid, verify};
use twistor_core::potential::central_values;
use twistor_core::sample::{Sampler, P_BOX};
use twistor_core::{Complex64, Error};

use crate::config::RunConfig;

pub struct Report {
    pub json: Value,
    pub csv: String,
    pub pass: bool,
}

fn cj(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn symmetric(p: Complex64) -> bool {
    (p - Complex64::from_polar(1.0, PI / 4.0)).norm() < 1e-9
}

pub fn integrals(cfg: &RunConfig) -> Result<Report, Error> {
    let depth = cfg.depth.unwrap_or(3);
    let tol = cfg.tol_or(1e-8);
    let moduli = cfg.moduli().map_err(Error::Config)?;
    let pair = OmegaPair::new(&moduli, depth)?;
    let anchors = if depth >= 1 { easy_anchor_residuals(&pair).to_vec() } else { vec![] };
    let mut worst = anchors.iter().cloned().fold(0.0, f64::max);
    let mut closed = Vec::new();
    if depth >= 2 {
        for (name, key, value) in [
            ("Omega21(1)", ClosedKey::Omega21AtOne, pair.one.at(&[2, 1])),
            ("Omega31(i)", ClosedKey::Omega31AtI, pair.i.at(&[3, 1])),
        ] {
            let c = omega_closed(&moduli, key)?;
            worst = worst.max((value - c).norm());
            closed
                .push(json!({"name": name, "quadrature": cj(value), "closed": cj(c), "residual": (value - c).norm()}));
        }
    }
    let shuffles = if depth >= 2 {
        let s = [shuffle_residual(&pair.one)?, shuffle_residual(&pair.i)?];
        worst = s.iter().map(|r| r.max()).fold(worst, f64::max);
        json!({"1": s[0], "i": s[1]})
    } else {
        Value::Null
    };
    let mut csv = String::from("endpoint,word,re,im,err\n");
    for table in [&pair.one, &pair.i] {
        for (w, v, e) in table.entries() {
            csv.push_str(&format!("{},{},{:e},{:e},{:e}\n", table.endpoint, w, v.re, v.im, e));
        }
    }
    let pass = worst < tol;
    Ok(Report {
        json: json!({
            "tables": [pair.one.to_json(), pair.i.to_json()],
            "anchors": anchors,
            "closed_forms": closed,
            "shuffle": shuffles,
            "max_residual": worst,
            "tolerance": tol,
        }),
        csv,
        pass,
    })
}

pub fn derive(cfg: &RunConfig) -> Result<Report, Error> {
    let tol = cfg.tol_or(1e-8);
    let moduli = cfg.moduli().map_err(Error::Config)?;
    let pair = OmegaPair::new(&moduli, cfg.depth.unwrap_or(cfg.order + 1))?;
    let (series, diag) = derive_with_diagnostics(&moduli, cfg.order, &pair)?;
    let constraint = series.constraint_residuals();
    let degrees_ok = series.degree_bounds_hold();
    let mut pass = degrees_ok && constraint.iter().all(|&r| r < tol);
    let first = if cfg.order >= 1 {
        let closed = first_order(&central_values(&moduli), &pair)?;
        let diff = (0..3).map(|j| (series.x(1, j) - &closed[j]).max_abs()).fold(0.0, f64::max);
        let matched = diff < 1e-9;
        pass &= matched;
        json!({"max_difference": diff, "match": matched})
    } else {
        Value::Null
    };
    let ranges: Vec<Value> = series
        .degree_ranges()
        .iter()
        .enumerate()
        .map(|(n, r)| json!({"n": n, "bound": n + 1, "ranges": r.iter().map(|(lo, hi)| [lo, hi]).collect::<Vec<_>>()}))
        .collect();
    let mut csv = String::from("n,j,degree,re,im\n");
    for n in 0..=series.order() {
        for j in 0..3 {
            let p = series.x(n, j);
            for (k, c) in p.coeffs().iter().enumerate() {
                csv.push_str(&format!("{},{},{},{:e},{:e}\n", n, j + 1, p.lo() + k as i32, c.re, c.im));
            }
        }
    }
    Ok(Report {
        json: json!({
            "series": series.to_json(),
            "degrees": {"ranges": ranges, "within_bound": degrees_ok},
            "constraint_residuals": constraint,
            "equation_residuals": diag.equation_residuals,
            "first_order": first,
            "tolerance": tol,
        }),
        csv,
        pass,
    })
}

pub fn verify_cmd(cfg: &RunConfig) -> Result<Report, Error> {
    let tol = cfg.tol_or(1e-6);
    let moduli = cfg.moduli().map_err(Error::Config)?;
    let pair = OmegaPair::new(&moduli, cfg.depth.unwrap_or(cfg.order + 1))?;
    let (series, _) = derive_with_diagnostics(&moduli, cfg.order, &pair)?;
    let grid = lambda_grid(cfg.lambda_grid);
    let rep = verify(&moduli, &series, &cfg.t_list, &grid, 1e-12)?;
    let mut pass = true;
    let mut checks = Vec::new();
    // zero weight: transports are the identity
    for (t, s) in rep.t.iter().zip(&rep.per_t) {
        let worst = s.p.max(s.q).max(s.r).max(s.k).max(s.fricke_q2);
        let limit = if *t == 0.0 { 1e-9 } else { tol };
        let ok = worst < limit;
        if *t > 0.0 {
            pass &= s.fricke_q1_min > 1e-3;
        }
        checks.push(json!({"t": t, "max_residual": worst, "limit": limit, "pass": ok}));
    }
    // absolute limit at the smallest positive weight only; larger weights are judged by slope
    let smallest = rep.t.iter().cloned().filter(|&t| t > 0.0).fold(f64::INFINITY, f64::min);
    for c in &checks {
        let t = c["t"].as_f64().unwrap_or(0.0);
        if t == 0.0 || t == smallest {
            pass &= c["pass"].as_bool().unwrap_or(false);
        }
    }
    if let Some(sl) = rep.slopes {
        pass &= [sl.p, sl.q, sl.r, sl.k, sl.fricke_q2].iter().all(|&x| x >= 3.7);
    }
    let mut csv = String::from("t,p,q,r,K,fricke_Q2,fricke_Q1_min\n");
    for (t, s) in rep.t.iter().zip(&rep.per_t) {
        csv.push_str(&format!(
            "{},{:e},{:e},{:e},{:e},{:e},{:e}\n",
            t, s.p, s.q, s.r, s.k, s.fricke_q2, s.fricke_q1_min
        ));
    }
    let mut json = rep.to_json();
    json["checks"] = Value::Array(checks);
    json["slope_threshold"] = json!(3.7);
    json["tolerance"] = json!(tol);
    Ok(Report { json, csv, pass })
}

pub fn geometry(cfg: &RunConfig) -> Result<Report, Error> {
    let moduli = cfg.moduli().map_err(Error::Config)?;
    let (u, v, p) = (moduli.u, moduli.v, moduli.p);
    let order = cfg.order;
    let pair = OmegaPair::new(&moduli, cfg.depth.unwrap_or(order + 1).max(2))?;
    let mut pass = true;

    let metric = eh_metric(u, v)?;
    let q = metric.checks();
    let (eig, _) = metric.real_eigenvalues();
    let forms = twisted_form_t0(u, v)?;
    pass &= q.max() < 1e-12 && eig[0] > 0.0;

    let (series, _) = derive_with_diagnostics(&moduli, order, &pair)?;
    let energy = energy_series(&series)?;
    let on_cone = (v - p * u).norm() < 1e-12 * u.norm().max(1.0);
    let mut rows = Vec::new();
    for (n, (&e, &im)) in energy.values.iter().zip(&energy.imag).enumerate() {
        let check = match n {
            0 => Some(8.0 * PI * (1.0 - series.central.rho * series.central.r2)),
            1 => Some(energy_first_closed(&moduli, &pair)),
            2 if symmetric(p) && on_cone => Some(0.0),
            2 if symmetric(p) => Some(energy_second_symmetric(u, v)),
            3 if symmetric(p) && on_cone => Some(energy_third_cone(u.norm())),
            _ => None,
        };
        let residual = check.map(|c| (e - c).abs() / c.abs().max(1.0));
        if let Some(r) = residual {
            pass &= r < 1e-5;
        }
        pass &= im.abs() <= 1e-8 * e.abs().max(1.0);
        rows.push(json!({"n": n, "value": e, "imag": im, "check": check, "residual": residual}));
    }

    let fd = cfg.fd_step;
    let form_series = twisted_form_series(&moduli, order.min(3), fd, &pair)?;
    let scale = (-1..=1).map(|k| form_series.get(0, k).max_abs()).fold(0.0, f64::max);
    let t0_match =
        (-1..=1).map(|k| form_series.get(0, k).dist(&forms.coeffs[(k + 1) as usize]) / scale).fold(0.0, f64::max);
    pass &= t0_match < 1e-6;
    let mut form_checks = json!({"weight_zero_match": t0_match, "scale": scale, "fd_step": fd});
    if form_series.order >= 2 {
        let w = form_series.get(2, 0);
        let higher = form_series.get(2, 1).max_abs().max(form_series.get(2, 2).max_abs()) / scale;
        let mixed = w.coeff(U, V).norm().max(w.coeff(UB, VB).norm()) / scale;
        pass &= higher < 1e-4 && mixed < 1e-4;
        form_checks["second_higher"] = json!(higher);
        form_checks["second_mixed"] = json!(mixed);
    }
    if form_series.order >= 3 && symmetric(p) && on_cone {
        let got = form_series.get(3, 0).restrict_to_line(p);
        let want = twisted_form_third_cone(u.norm());
        let rel = (got / (Complex64::i() * 32.0 * PI) - want).norm() / want;
        pass &= rel < 1e-3;
        form_checks["cone_third"] = json!({"value": cj(got), "expected_per_32_pi_i": want, "relative": rel});
    }

    let psi = nilpotent_higgs(u, v);
    let a = nahc_t0(&psi)?;
    let round = nahc_t0_inv(&a)?.dist(&psi);
    pass &= round < 1e-12 * (1.0 + psi.max_abs());

    let mut csv = String::from("n,value,imag,check,residual\n");
    for r in &rows {
        let opt = |v: &Value| v.as_f64().map(|x| format!("{x:e}")).unwrap_or_default();
        csv.push_str(&format!(
            "{},{:e},{:e},{},{}\n",
            r["n"],
            r["value"].as_f64().unwrap_or(f64::NAN),
            r["imag"].as_f64().unwrap_or(f64::NAN),
            opt(&r["check"]),
            opt(&r["residual"])
        ));
    }
    Ok(Report {
        json: json!({
            "metric": {
                "gram": metric.gram.to_rows(),
                "I": metric.i.to_rows(),
                "J": metric.j.to_rows(),
                "K": metric.k.to_rows(),
                "checks": {"J2": q.j2, "K2": q.k2, "I2": q.i2, "IJ_minus_K": q.ij_minus_k},
                "real_eigenvalues": eig,
            },
            "forms": {
                "omega_I": forms.omega_i.to_rows(),
                "omega_J": forms.omega_j.to_rows(),
                "omega_K": forms.omega_k.to_rows(),
            },
            "energy": rows,
            "twisted_form": form_checks,
            "hodge": {"A": [[cj(a.m[0][0]), cj(a.m[0][1])], [cj(a.m[1][0]), cj(a.m[1][1])]], "det": cj(a.det()), "round_trip": round},
        }),
        csv,
        pass,
    })
}

pub fn identities(cfg: &RunConfig) -> Result<Report, Error> {
    let tol = cfg.tol_or(1e-7);
    let depth = cfg.depth.unwrap_or(3);
    let mut sampler = Sampler::new(cfg.seed);
    let points: Vec<Complex64> = (0..cfg.count).map(|_| sampler.p()).collect();
    let mut samples = Vec::new();
    let mut csv = String::from("sample,p_re,p_im,identity,residual\n");
    let mut pass = true;
    for (k, &p) in points.iter().enumerate() {
        let moduli = twistor_core::potential::ModuliConfig::new(p, cfg.u, cfg.v)?;
        let checks = identity_suite(&OmegaPair::new(&moduli, depth)?)?;
        for chk in &checks {
            let limit = if chk.name.starts_with("constant") { tol.max(1e-6) } else { tol };
            pass &= chk.residual < limit;
            csv.push_str(&format!("{k},{},{},{},{:e}\n", p.re, p.im, chk.name, chk.residual));
        }
        samples.push(json!({
            "index": k,
            "p": cj(p),
            "checks": checks.iter().map(|c| json!({"name": c.name, "lhs": cj(c.lhs), "rhs": cj(c.rhs), "residual": c.residual})).collect::<Vec<_>>(),
        }));
    }
    Ok(Report { json: json!({"box": [P_BOX.0, P_BOX.1], "samples": samples, "tolerance": tol}), csv, pass })
}
