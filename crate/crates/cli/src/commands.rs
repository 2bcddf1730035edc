use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use xxz_roots::bethe::{bae_residual, solve_bae, solve_tt, theta_path, tt_residual, TTSystem, BAE_SEED};
use xxz_roots::spectra::energy_from_roots;
use xxz_roots::spectra::json::{RecordDoc, SpectrumDoc};
use xxz_roots::thermo::{
    af_even_ground_energy, af_odd_ground_energy, closed_form_density, dispersion, excitation_energy,
    ferro_excited_integral_energy, ferro_ground_energy, ferro_ground_integral_energy, solve_density, GapVariant,
    GaussLegendre, QUADRATURE_NODES,
};
use xxz_roots::{Complex64, ExcitationSpec, ModelParams};

use crate::cache::{write_atomic, Cache};
use crate::config::{
    BaeConfig, ContinueConfig, DispersionConfig, FitConfig, RootsConfig, SpectrumConfig, ThermoConfig,
};
use crate::docs::{BaeDoc, BaeSolution, Coefficient, ContinuationDoc, EdMatch, FitDoc, ThermoDoc};
use crate::error::{CliError, Result};
use crate::output::{num, write_json, Table};
use crate::pipeline::{self, counts, root_distance, rootset, roots_of, FitCase};

pub fn out_dir(out: Option<&Path>) -> PathBuf {
    out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."))
}

pub fn spectrum(cfg: &SpectrumConfig, cache: &Cache) -> Result<PathBuf> {
    let params = cfg.model().params()?;
    let run = pipeline::spectrum(&params, cfg.pair_tol, cache)?;
    let path = out_dir(cfg.out.as_deref()).join("spectrum.json");
    write_atomic(&path, run.text.as_bytes())?;
    let source = if run.from_cache { "cache" } else { "computed" };
    println!(
        "spectrum N={} records={} ground={:.12} ({source}) -> {}",
        params.n_sites(),
        run.doc.records.len(),
        run.doc.records[0].energy,
        path.display()
    );
    Ok(path)
}

/// One row per root: record, energy, momentum, root index, position, tag.
pub fn roots_table(doc: &SpectrumDoc, records: &[usize]) -> Result<Table> {
    let mut t = Table::new(&[
        "record", "energy", "momentum", "root", "re", "im", "tag", "partner", "string",
    ])?;
    for &i in records {
        let r = doc
            .records
            .get(i)
            .ok_or_else(|| CliError::Config(format!("record {i} out of range 0..{}", doc.records.len())))?;
        for (j, z) in r.roots.iter().enumerate() {
            let (tag, partner, string) = match r.classification.get(j) {
                Some(xxz_roots::spectra::RootTag::Imaginary) => ("imaginary", String::new(), String::new()),
                Some(xxz_roots::spectra::RootTag::Pair { partner, string, .. }) => {
                    ("pair", partner.to_string(), string.to_string())
                }
                _ => ("unpaired", String::new(), String::new()),
            };
            t.row([
                i.to_string(),
                num(r.energy),
                num(r.momentum),
                j.to_string(),
                num(z.re),
                num(z.im),
                tag.to_string(),
                partner,
                string,
            ])?;
        }
    }
    Ok(t)
}

pub fn roots(cfg: &RootsConfig, cache: &Cache) -> Result<PathBuf> {
    let params = cfg.model().params()?;
    let run = pipeline::spectrum(&params, cfg.pair_tol, cache)?;
    let records: Vec<usize> = if cfg.all.unwrap_or(false) {
        (0..run.doc.records.len()).collect()
    } else {
        cfg.records.clone().unwrap_or_else(|| vec![0])
    };
    let path = out_dir(cfg.out.as_deref()).join("roots.csv");
    roots_table(&run.doc, &records)?.write(&path)?;
    for &i in records.iter().take(8) {
        let c = counts(&run.doc.records[i].classification);
        println!(
            "record {i}: E={:.12} imaginary={} pairs={} unpaired={}",
            run.doc.records[i].energy, c.imaginary, c.pairs, c.unpaired
        );
    }
    println!("-> {}", path.display());
    Ok(path)
}

/// Seeds from an ED record at the configured θ and continues to `θ = 0`.
/// Relative energy window inside which two records count as one level.
const DEGENERACY: f64 = 1e-9;

fn lambda_gap(r: &RecordDoc, lambda0: Complex64) -> f64 {
    r.lambda0.map_or(f64::INFINITY, |l| (Complex64::from(l) - lambda0).norm())
}

pub fn continuation(
    params: &ModelParams,
    record: usize,
    steps: usize,
    pair_tol: Option<f64>,
    cache: &Cache,
) -> Result<ContinuationDoc> {
    let run = pipeline::spectrum(params, pair_tol, cache)?;
    let rec = run
        .doc
        .records
        .get(record)
        .ok_or_else(|| CliError::Config(format!("record {record} out of range 0..{}", run.doc.records.len())))?;
    let start = rootset(rec).ok_or_else(|| CliError::Config(format!("record {record} has no roots")))?;
    let seed = TTSystem::from_rootset(params, &start)?;
    let end = solve_tt(&seed, &theta_path(params.thetas(), steps.max(1)))?;
    let residual = tt_residual(&end).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let homogeneous = params.homogeneous_limit();
    let end_roots = end.to_rootset();
    let energy = energy_from_roots(&end_roots, &homogeneous)?;

    let target = pipeline::spectrum(&homogeneous, pair_tol, cache)?;
    // degenerate levels share roots, so λ0 picks the record
    let window = DEGENERACY * energy.abs().max(1.0);
    let lambda0 = end.lambda0();
    let best = target
        .doc
        .records
        .iter()
        .filter(|r| (r.energy - energy).abs() <= window)
        .min_by(|a, b| lambda_gap(a, lambda0).total_cmp(&lambda_gap(b, lambda0)))
        .or_else(|| {
            target
                .doc
                .records
                .iter()
                .min_by(|a, b| (a.energy - energy).abs().total_cmp(&(b.energy - energy).abs()))
        })
        .expect("non-empty spectrum");
    let best_delta = (best.energy - energy).abs();
    Ok(ContinuationDoc {
        kind: "continuation".into(),
        params: params.into(),
        record,
        steps: steps.max(1),
        start_lambda0: start.lambda0.into(),
        start_roots: start.roots.iter().map(|&z| z.into()).collect(),
        lambda0: lambda0.into(),
        roots: end_roots.roots.iter().map(|&z| z.into()).collect(),
        residual,
        energy,
        ed_match: EdMatch {
            record: best.index,
            energy: best.energy,
            energy_delta: best_delta,
            root_distance: root_distance(&end_roots.roots, &roots_of(best)),
        },
    })
}

pub fn continue_cmd(cfg: &ContinueConfig, cache: &Cache) -> Result<PathBuf> {
    let params = cfg.model().params()?;
    let doc = continuation(&params, cfg.record.unwrap_or(0), cfg.steps.unwrap_or(8), cfg.pair_tol, cache)?;
    let path = out_dir(cfg.out.as_deref()).join("continuation.json");
    write_json(&path, &doc)?;
    println!(
        "continued record {} to θ=0: E={:.12}, nearest ED record {} (ΔE={:.2e}, root distance {:.2e}) -> {}",
        doc.record,
        doc.energy,
        doc.ed_match.record,
        doc.ed_match.energy_delta,
        doc.ed_match.root_distance,
        path.display()
    );
    Ok(path)
}

pub fn bae(cfg: &BaeConfig, cache: &Cache) -> Result<PathBuf> {
    let params = cfg.model().params()?;
    let starts = cfg.starts.unwrap_or(200);
    let report = solve_bae(&params, starts)?;
    let run = pipeline::spectrum(&params, cfg.pair_tol, cache)?;
    let eta = params.eta();
    let solutions = report
        .solutions
        .iter()
        .zip(&report.matched_records)
        .map(|(s, &record)| BaeSolution {
            lambdas: s.lambdas.iter().map(|&z| z.into()).collect(),
            u: s.u(eta).into_iter().map(Into::into).collect(),
            record,
            energy: run.doc.records[record].energy,
            max_residual: bae_residual(s, &params)
                .ok()
                .map(|r| r.iter().map(|z| z.norm()).fold(0.0, f64::max))
                .filter(|r| r.is_finite()),
        })
        .collect();
    let doc = BaeDoc {
        kind: "bae".into(),
        params: (&params).into(),
        seed: BAE_SEED ^ params.n_sites() as u64,
        starts: report.starts,
        converged: report.converged,
        coverage: report.coverage,
        solutions,
    };
    let path = out_dir(cfg.out.as_deref()).join("bae.json");
    write_json(&path, &doc)?;
    println!(
        "bae N={}: {} solutions, coverage {:.3} ({} converged Newton runs from {} starts) -> {}",
        params.n_sites(),
        doc.solutions.len(),
        doc.coverage,
        doc.converged,
        doc.starts,
        path.display()
    );
    Ok(path)
}

fn parse_variant(s: &str) -> Result<GapVariant> {
    match s {
        "printed" => Ok(GapVariant::Printed),
        "unit-coefficient" => Ok(GapVariant::UnitCoefficient),
        other => Err(CliError::Config(format!("variant `{other}`: expected printed or unit-coefficient"))),
    }
}

pub fn thermo_doc(cfg: &ThermoConfig) -> Result<ThermoDoc> {
    let case = cfg.case.as_deref().ok_or_else(|| CliError::Config("missing key `case`".into()))?;
    let n = cfg.n.unwrap_or(10);
    let ep = cfg.eta.unwrap_or(0.75);
    let k = cfg.truncation.unwrap_or(100);
    let variant_name = cfg.variant.clone().unwrap_or_else(|| "unit-coefficient".into());
    let variant = parse_variant(&variant_name)?;
    let spec = match case {
        "ferro-ground" => ExcitationSpec::FerroGround,
        "ferro-excited" => ExcitationSpec::FerroExcited {
            n: cfg.string.unwrap_or(2),
            alpha: cfg.alpha.unwrap_or(-FRAC_PI_2),
        },
        "af-even" => ExcitationSpec::AfEven { beta: cfg.beta.unwrap_or(0.0) },
        "af-odd-ground" => ExcitationSpec::AfOddGround,
        "af-odd-excited" => ExcitationSpec::AfOddExcited {
            p: cfg.p.unwrap_or(0.0),
            q: cfg.q.unwrap_or(0.0),
        },
        other => {
            return Err(CliError::Config(format!(
                "case `{other}`: expected ferro-ground, ferro-excited, af-even, af-odd-ground or af-odd-excited"
            )))
        }
    };
    let ferro = matches!(spec, ExcitationSpec::FerroGround | ExcitationSpec::FerroExcited { .. });
    let parity_ok = match spec {
        ExcitationSpec::AfEven { .. } => n % 2 == 0,
        ExcitationSpec::AfOddGround | ExcitationSpec::AfOddExcited { .. } => n % 2 == 1,
        _ => true,
    };
    if !parity_ok {
        return Err(CliError::Config(format!("N = {n} has the wrong parity for {case}")));
    }
    let eta = if ferro {
        Complex64::new(ep, 0.0)
    } else {
        Complex64::new(ep, std::f64::consts::PI)
    };
    let closed = closed_form_density(spec, ep, n, k)?;
    let solved = solve_density(spec, |_| Complex64::new(1.0, 0.0), ep, n, k)?;
    let kk = k as i64;
    let solve_closed_gap = (-kk..=kk)
        .map(|j| (closed.coeff(j) - solved.coeff(j)).norm())
        .fold(0.0, f64::max);
    let ground_energy = match spec {
        ExcitationSpec::FerroGround | ExcitationSpec::FerroExcited { .. } => ferro_ground_energy(n, ep),
        ExcitationSpec::AfEven { .. } => af_even_ground_energy(n, ep),
        _ => af_odd_ground_energy(n, ep),
    };
    let quad = GaussLegendre::new(QUADRATURE_NODES);
    let integral_energy = match spec {
        ExcitationSpec::FerroGround => Some(ferro_ground_integral_energy(&closed, &quad)?),
        ExcitationSpec::FerroExcited { .. } => Some(ferro_excited_integral_energy(&closed, &quad)?),
        _ => None,
    };
    Ok(ThermoDoc {
        kind: "thermo".into(),
        spec,
        n_sites: n,
        eta: ep,
        truncation: k,
        variant: variant_name,
        ground_energy,
        excitation_energy: excitation_energy(spec, eta, variant)?,
        integral_energy,
        solve_closed_gap,
        coefficients: (-kk..=kk)
            .map(|j| {
                let c = closed.coeff(j);
                Coefficient { k: j, re: c.re, im: c.im }
            })
            .collect(),
    })
}

pub fn thermo(cfg: &ThermoConfig) -> Result<PathBuf> {
    let doc = thermo_doc(cfg)?;
    let dir = out_dir(cfg.out.as_deref());
    let points = cfg.points.unwrap_or(201);
    let profile = closed_form_density(doc.spec, doc.eta, doc.n_sites, doc.truncation)?;
    let mut t = Table::new(&["x", "density"])?;
    for j in 0..points {
        let x = -FRAC_PI_2 + std::f64::consts::PI * j as f64 / points as f64;
        t.row([num(x), num(profile.density_at(x)?)])?;
    }
    t.write(&dir.join("density.csv"))?;
    let path = dir.join("thermo.json");
    write_json(&path, &doc)?;
    println!(
        "{}: ground {:.12}, excitation {:.12}, solve vs closed {:.2e} -> {}",
        doc.spec.name(),
        doc.ground_energy,
        doc.excitation_energy,
        doc.solve_closed_gap,
        path.display()
    );
    Ok(path)
}

pub fn fit_doc(cfg: &FitConfig, cache: &Cache) -> Result<FitDoc> {
    let case = FitCase::parse(cfg.case.as_deref().ok_or_else(|| CliError::Config("missing key `case`".into()))?)?;
    let sizes = cfg.sizes.clone().unwrap_or_else(|| case.default_sizes());
    let model = match cfg.model.as_deref() {
        Some(m) => pipeline::parse_model(m)?,
        None => case.default_model(),
    };
    let cap = cfg.cap.unwrap_or(xxz_roots::model::DEFAULT_DENSE_CAP);
    pipeline::fit(case, &sizes, cfg.eta.unwrap_or(0.75), model, cap, cache)
}

pub fn fit_table(doc: &FitDoc) -> Result<Table> {
    let mut t = Table::new(&["n", "record", "energy_ed", "energy_formula", "deviation", "included"])?;
    for p in &doc.points {
        t.row([
            p.n.to_string(),
            p.record.to_string(),
            num(p.energy_ed),
            num(p.energy_formula),
            num(p.deviation),
            u8::from(p.included).to_string(),
        ])?;
    }
    Ok(t)
}

pub fn fit(cfg: &FitConfig, cache: &Cache) -> Result<PathBuf> {
    let doc = fit_doc(cfg, cache)?;
    let dir = out_dir(cfg.out.as_deref());
    fit_table(&doc)?.write(&dir.join("fit.csv"))?;
    let path = dir.join("fit.json");
    write_json(&path, &doc)?;
    println!(
        "{} {:?} fit: A={:.6} rate={:.6} rms={:.3e} -> {}",
        doc.case,
        doc.fit.model,
        doc.fit.amplitude,
        doc.fit.rate,
        doc.fit.rms_residual,
        path.display()
    );
    Ok(path)
}

pub fn dispersion_table(ep: f64, points: usize) -> Result<Table> {
    if points == 0 {
        return Err(CliError::Config("points must be at least 1".into()));
    }
    let mut t = Table::new(&["t", "epsilon", "zeta"])?;
    for p in dispersion(ep, points)? {
        t.row([num(p.t), num(p.epsilon), num(p.zeta)])?;
    }
    Ok(t)
}

pub fn dispersion_cmd(cfg: &DispersionConfig) -> Result<PathBuf> {
    let ep = cfg.eta.unwrap_or(1.31696);
    let points = cfg.points.unwrap_or(201);
    let path = out_dir(cfg.out.as_deref()).join("dispersion.csv");
    dispersion_table(ep, points)?.write(&path)?;
    println!("dispersion η₊={ep} points={points} -> {}", path.display());
    Ok(path)
}
