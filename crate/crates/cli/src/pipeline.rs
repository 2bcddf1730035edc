//! Cached ED spectra and the analyses built on them.

use rayon::prelude::*;
use xxz_roots::spectra::json::{ParamsDoc, RecordDoc, SpectrumDoc};
use xxz_roots::spectra::{
    classify_roots, default_pair_tolerance, extract_roots, fit_decay, joint_eigenbasis, DecayModel, FitResult,
    RootSet, RootTag, DEFAULT_PROBE,
};
use xxz_roots::thermo::{
    af_even_ground_energy, af_odd_ground_energy, closed_form_density, ferro_excited_integral_energy,
    ferro_ground_energy, GaussLegendre, QUADRATURE_NODES,
};
use xxz_roots::{Complex64, ExcitationSpec, ModelParams};

use crate::cache::{cache_key, Cache, Tolerances};
use crate::docs::{FitDoc, FitPoint};
use crate::error::{CliError, Result};
use crate::output::json_text;

/// Deviations below this are dropped from fits.
pub const DEVIATION_FLOOR: f64 = 1e-12;
/// Fourier truncation for the pair-state integral energy.
pub const PAIR_TRUNCATION: usize = 100;

pub struct SpectrumRun {
    pub doc: SpectrumDoc,
    /// Exact bytes of the cached document.
    pub text: String,
    pub from_cache: bool,
}

/// Joint eigenbasis with roots and classification for every record.
///
/// Served from the cache when an entry for the same key holds the same
/// parameters; unreadable entries are recomputed and replaced.
pub fn spectrum(params: &ModelParams, pair_tol: Option<f64>, cache: &Cache) -> Result<SpectrumRun> {
    let tol = pair_tol.unwrap_or_else(|| default_pair_tolerance(params));
    if !(tol > 0.0) {
        return Err(CliError::Config(format!("pair-tol = {tol} must be positive")));
    }
    let key = cache_key("spectrum", params, Tolerances::new(tol));
    if let Some(text) = cache.load(&key) {
        match SpectrumDoc::from_json(&text) {
            Ok(doc) if doc.params == ParamsDoc::from(params) => {
                log::info!("cache hit {key}");
                return Ok(SpectrumRun {
                    doc,
                    text,
                    from_cache: true,
                });
            }
            Ok(_) => log::info!("cache entry {key} holds a permutation of θ; recomputing"),
            Err(e) => log::warn!("corrupt cache entry {key} ({e}); recomputing"),
        }
    }
    let doc = compute_spectrum(params, tol)?;
    let text = json_text(&doc)?;
    cache.store(&key, &text)?;
    Ok(SpectrumRun {
        doc,
        text,
        from_cache: false,
    })
}

fn compute_spectrum(params: &ModelParams, tol: f64) -> Result<SpectrumDoc> {
    let spectrum = joint_eigenbasis(params, DEFAULT_PROBE)?;
    let records: Vec<RecordDoc> = spectrum
        .records()
        .par_iter()
        .map(|r| {
            let (lambda0, roots, classification) = match extract_roots(r, params) {
                Ok(rs) => {
                    let cls = classify_roots(&rs, params, tol);
                    (Some(rs.lambda0.into()), rs.roots.iter().map(|&z| z.into()).collect(), cls.tags)
                }
                Err(e) => {
                    log::warn!("record {}: {e}", r.index);
                    (None, Vec::new(), Vec::new())
                }
            };
            RecordDoc {
                index: r.index,
                energy: r.energy,
                momentum: r.momentum,
                lambda0,
                roots,
                classification,
            }
        })
        .collect();
    Ok(SpectrumDoc {
        params: params.into(),
        records,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub imaginary: usize,
    pub pairs: usize,
    pub unpaired: usize,
}

pub fn counts(tags: &[RootTag]) -> Counts {
    let mut c = Counts::default();
    for t in tags {
        match t {
            RootTag::Imaginary => c.imaginary += 1,
            RootTag::Pair { .. } => c.pairs += 1,
            RootTag::Unpaired => c.unpaired += 1,
        }
    }
    c.pairs /= 2;
    c
}

pub fn roots_of(record: &RecordDoc) -> Vec<Complex64> {
    record.roots.iter().map(|&z| z.into()).collect()
}

pub fn rootset(record: &RecordDoc) -> Option<RootSet> {
    record.lambda0.map(|l| RootSet::new(l.into(), roots_of(record)))
}

/// Lowest excited record with exactly one pair and no unpaired root.
pub fn first_pair_state(doc: &SpectrumDoc) -> Option<&RecordDoc> {
    doc.records.iter().skip(1).find(|r| {
        let c = counts(&r.classification);
        r.lambda0.is_some() && c.pairs == 1 && c.unpaired == 0
    })
}

/// `Im z` of the pair roots of a record.
pub fn pair_alpha(record: &RecordDoc) -> Option<f64> {
    record
        .classification
        .iter()
        .zip(&record.roots)
        .find(|(t, _)| matches!(t, RootTag::Pair { .. }))
        .map(|(_, z)| z.im)
}

/// Lowest record with `pairs` pairs, `imaginary` imaginary roots and nothing unpaired.
pub fn first_with_pattern(doc: &SpectrumDoc, pairs: usize, imaginary: usize) -> Option<&RecordDoc> {
    doc.records.iter().find(|r| {
        let c = counts(&r.classification);
        r.lambda0.is_some() && c.pairs == pairs && c.imaginary == imaginary && c.unpaired == 0
    })
}

/// Greedy multiset distance with `Im` compared modulo `π`.
pub fn root_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let pi = std::f64::consts::PI;
    let gap = |x: Complex64, y: Complex64| {
        let d = x - y;
        let im = d.im - pi * (d.im / pi).round();
        d.re.hypot(im)
    };
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for &x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, &y)| (j, gap(x, y)))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("equal lengths");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitCase {
    FerroGround,
    FerroExcited,
    AfEven,
    AfOdd,
}

impl FitCase {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "ferro-ground" => Self::FerroGround,
            "ferro-excited" => Self::FerroExcited,
            "af-even" => Self::AfEven,
            "af-odd" => Self::AfOdd,
            other => {
                return Err(CliError::Config(format!(
                    "case `{other}`: expected ferro-ground, ferro-excited, af-even or af-odd"
                )))
            }
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::FerroGround => "ferro-ground",
            Self::FerroExcited => "ferro-excited",
            Self::AfEven => "af-even",
            Self::AfOdd => "af-odd",
        }
    }

    pub fn default_sizes(self) -> Vec<usize> {
        match self {
            Self::AfOdd => vec![5, 7, 9, 11],
            _ => vec![6, 8, 10, 12],
        }
    }

    pub fn default_model(self) -> DecayModel {
        match self {
            Self::FerroGround | Self::FerroExcited => DecayModel::Exponential,
            Self::AfEven | Self::AfOdd => DecayModel::Power,
        }
    }

    fn params(self, n: usize, eta: f64) -> Result<ModelParams> {
        let parity_ok = match self {
            Self::AfEven => n % 2 == 0,
            Self::AfOdd => n % 2 == 1,
            _ => true,
        };
        if !parity_ok {
            return Err(CliError::Config(format!("N = {n} has the wrong parity for {}", self.name())));
        }
        Ok(match self {
            Self::FerroGround | Self::FerroExcited => ModelParams::ferromagnetic(n, eta)?,
            Self::AfEven | Self::AfOdd => ModelParams::antiferromagnetic(n, eta)?,
        })
    }
}

pub fn parse_model(s: &str) -> Result<DecayModel> {
    match s {
        "exponential" => Ok(DecayModel::Exponential),
        "power" => Ok(DecayModel::Power),
        other => Err(CliError::Config(format!("model `{other}`: expected exponential or power"))),
    }
}

/// ED energy and thermodynamic formula at one size.
fn fit_point(case: FitCase, n: usize, eta: f64, cache: &Cache) -> Result<FitPoint> {
    let params = case.params(n, eta)?;
    let run = spectrum(&params, None, cache)?;
    let ground = &run.doc.records[0];
    let (record, energy_ed, energy_formula, alpha) = match case {
        FitCase::FerroGround => (ground.index, ground.energy, ferro_ground_energy(n, eta), None),
        FitCase::AfEven => (ground.index, ground.energy, af_even_ground_energy(n, eta), None),
        FitCase::AfOdd => (ground.index, ground.energy, af_odd_ground_energy(n, eta), None),
        FitCase::FerroExcited => {
            let r = first_pair_state(&run.doc)
                .ok_or_else(|| CliError::Config(format!("no single-pair state at N = {n}")))?;
            let alpha = pair_alpha(r).expect("pair state has a pair");
            let spec = ExcitationSpec::FerroExcited { n: 2, alpha };
            let profile = closed_form_density(spec, eta, n, PAIR_TRUNCATION)?;
            let formula = ferro_excited_integral_energy(&profile, &GaussLegendre::new(QUADRATURE_NODES))?;
            (r.index, r.energy, formula, Some(alpha))
        }
    };
    let deviation = (energy_ed - energy_formula).abs();
    Ok(FitPoint {
        n,
        record,
        alpha,
        energy_ed,
        energy_formula,
        deviation,
        included: deviation >= DEVIATION_FLOOR,
    })
}

/// Deviation sweep over `sizes` in parallel, then a decay fit.
pub fn fit(case: FitCase, sizes: &[usize], eta: f64, model: DecayModel, cap: usize, cache: &Cache) -> Result<FitDoc> {
    if sizes.len() < 3 {
        return Err(CliError::Config(format!("fit needs at least 3 sizes, got {}", sizes.len())));
    }
    if let Some(&n) = sizes.iter().find(|&&n| n > cap) {
        return Err(CliError::Config(format!("N = {n} exceeds cap = {cap}")));
    }
    let points: Vec<FitPoint> = sizes
        .par_iter()
        .map(|&n| fit_point(case, n, eta, cache))
        .collect::<Result<_>>()?;
    for p in points.iter().filter(|p| !p.included) {
        log::warn!("N = {}: deviation {:e} below {DEVIATION_FLOOR:e}, excluded", p.n, p.deviation);
    }
    let data: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.included)
        .map(|p| (p.n as f64, p.deviation))
        .collect();
    let fit: FitResult = fit_decay(&data, model)?;
    Ok(FitDoc {
        kind: "fit".into(),
        case: case.name().into(),
        eta,
        points,
        fit,
    })
}
