//! One function per subcommand, each producing a table.

use std::f64::consts::PI;

use ringchain::bands::flat::SAME_POINT;
use ringchain::bands::{
    detect_flat_bands, find_negative_bands, predict_flat_bands, scan_bands, scan_bands_between, BandKind, BandScan,
    ScanOptions,
};
use ringchain::oracle::{equivalence_report, random_samples};
use ringchain::probability::{
    closed_form_probability, periodic_probability, scan_probability, torus_probability, ProbabilityEstimate,
    TorusOptions,
};
use ringchain::rational::{recognize, Length, Ratio, MATCH_TOL, MAX_DENOMINATOR};
use ringchain::{ChainSpec, Variant};
use serde_json::{json, Value};

use crate::args::{
    parse_grid, parse_length_value, parse_number, Axis, BandsArgs, BranchArg, FlatbandsArgs, Mode, NegbandsArgs,
    OracleArgs, ProbArgs, ScanArgs, SpecArgs, SweepArgs,
};
use crate::error::CliError;
use crate::output::{Cell, PlotKind, Table};

/// A finished computation: the table, how to plot it, a human summary for
/// stderr, and a failure to report once the table has been written.
pub struct Report {
    pub table: Table,
    pub plot: Option<(String, PlotKind)>,
    pub summary: Vec<String>,
    pub failure: Option<CliError>,
}

impl Report {
    fn new(table: Table) -> Self {
        Self {
            table,
            plot: None,
            summary: Vec::new(),
            failure: None,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn build_spec(a: &SpecArgs) -> Result<ChainSpec, CliError> {
    let flux = a.flux.ok_or_else(|| usage("--A is required"))?;
    let need = |l: Option<Length>, flag: &str| l.map(|l| l.value).ok_or_else(|| usage(format!("{flag} is required for the {} chain", Variant::from(a.variant))));
    let spec = match Variant::from(a.variant) {
        Variant::Loose => ChainSpec::loose(a.ell.value, need(a.l1, "--l1")?, need(a.l3, "--l3")?, flux),
        Variant::Tight => {
            if a.l1.is_some() {
                return Err(usage("the tight chain has no link; drop --l1"));
            }
            ChainSpec::tight(a.ell.value, need(a.l3, "--l3")?, flux)
        }
        Variant::Merged => {
            if a.l3.is_some() {
                return Err(usage("the merged chain has no free arc; drop --l3"));
            }
            ChainSpec::merged(a.ell.value, need(a.l1, "--l1")?, flux)
        }
    };
    Ok(spec?)
}

fn length_json(l: Option<Length>) -> Value {
    match l {
        None => Value::Null,
        Some(Length { value, pi_multiple: Some(r) }) => json!({ "value": value, "pi_multiple": r.to_string() }),
        Some(l) => json!(l.value),
    }
}

fn spec_json(a: &SpecArgs) -> Value {
    json!({
        "variant": Variant::from(a.variant).name(),
        "ell": length_json(Some(a.ell)),
        "l1": length_json(a.l1),
        "l3": length_json(a.l3),
        "A": a.flux,
    })
}

fn scan_options(length: f64, scan: &ScanArgs) -> ScanOptions {
    let opts = ScanOptions::for_range(length).with_edge_tol(scan.edge_tol);
    match scan.points_per_unit {
        Some(ppu) => opts.with_grid((ppu * length).ceil().max(2.0) as usize),
        None => opts,
    }
}

fn kind_name(kind: BandKind) -> &'static str {
    match kind {
        BandKind::Continuous => "continuous",
        BandKind::FlatPoint => "flat_point",
    }
}

fn scan_tolerances(opts: &ScanOptions) -> Value {
    json!({ "edge_tol": opts.edge_tol, "grid_points": opts.grid_points, "max_bisections": opts.max_iter })
}

pub fn bands(args: &BandsArgs) -> Result<Report, CliError> {
    let spec = build_spec(&args.spec)?;
    if !(args.kmax > args.kmin && args.kmin >= 0.0) {
        return Err(usage("need 0 ≤ kmin < kmax"));
    }
    let opts = scan_options(args.kmax - args.kmin, &args.scan);
    let scan = if args.kmin > 0.0 {
        scan_bands_between(&spec, args.kmin, args.kmax, &opts)?
    } else {
        scan_bands(&spec, args.kmax, &opts)?
    };
    let mut table = Table::new(
        "bands",
        &["band", "k_lo", "k_hi", "energy_lo", "energy_hi", "kind", "edge_tol", "truncated"],
    );
    for (i, b) in scan.bands.iter().enumerate() {
        table.push(vec![
            (i + 1).into(),
            b.lo.into(),
            b.hi.into(),
            (b.lo * b.lo).into(),
            (b.hi * b.hi).into(),
            kind_name(b.kind).into(),
            b.edge_tol.into(),
            b.truncated.into(),
        ]);
    }
    table.parameters = json!({ "spec": spec_json(&args.spec), "kmin": args.kmin, "kmax": args.kmax });
    table.tolerances = scan_tolerances(&opts);
    table.notes = scan.warnings.clone();
    let mut report = Report::new(table);
    report.summary.push(format!(
        "{} bands in [{}, {}], covering {:.6} of the range",
        scan.bands.len(),
        args.kmin,
        args.kmax,
        scan.covered_length(args.kmin, args.kmax) / (args.kmax - args.kmin)
    ));
    report.plot = Some((
        format!("{} chain bands", spec.variant()),
        PlotKind::Intervals { lo: 2, hi: 3, label: "k" },
    ));
    Ok(report)
}

pub fn negbands(args: &NegbandsArgs) -> Result<Report, CliError> {
    let spec = build_spec(&args.spec)?;
    if !(args.kappa_max > 0.0) {
        return Err(usage("--kappa-max must be positive"));
    }
    let opts = scan_options(args.kappa_max, &args.scan);
    let scan = find_negative_bands(&spec, args.kappa_max, &opts)?;
    let mut table = Table::new(
        "negbands",
        &["band", "kappa_lo", "kappa_hi", "energy_lo", "energy_hi", "kind", "edge_tol", "truncated"],
    );
    for (i, b) in scan.bands.iter().enumerate() {
        table.push(vec![
            (i + 1).into(),
            b.lo.into(),
            b.hi.into(),
            (-b.hi * b.hi).into(),
            (-b.lo * b.lo).into(),
            kind_name(b.kind).into(),
            b.edge_tol.into(),
            b.truncated.into(),
        ]);
    }
    table.parameters = json!({ "spec": spec_json(&args.spec), "kappa_max": args.kappa_max });
    table.tolerances = scan_tolerances(&opts);
    table.notes = scan.warnings.clone();
    let mut report = Report::new(table);
    report.summary.push(format!(
        "{} negative bands for κ in (0, {}], at most {} possible",
        scan.bands.len(),
        args.kappa_max,
        spec.variant().negative_band_cap()
    ));
    report.plot = Some((
        format!("{} chain negative bands", spec.variant()),
        PlotKind::Intervals { lo: 2, hi: 3, label: "kappa" },
    ));
    Ok(report)
}

pub fn flatbands(args: &FlatbandsArgs) -> Result<Report, CliError> {
    let spec = build_spec(&args.spec)?;
    if !(args.kmax > 0.0) {
        return Err(usage("--kmax must be positive"));
    }
    let hits = detect_flat_bands(&spec, args.kmax)?;
    let predicted = predict_flat_bands(&spec, args.kmax)?;
    let near = |x: f64, y: f64| (x - y).abs() <= SAME_POINT * x.abs().max(1.0);

    // (k, mechanism, predicted, scaled max of the detection, provenance)
    let mut rows: Vec<(f64, String, bool, Option<f64>, String)> = predicted
        .predictions
        .iter()
        .map(|p| {
            let hit = hits.iter().find(|h| near(h.k, p.k_value)).map(|h| h.scaled_max());
            (p.k_value, p.mechanism.to_string(), true, hit, p.provenance.clone())
        })
        .collect();
    for h in &hits {
        if !predicted.predictions.iter().any(|p| near(h.k, p.k_value)) {
            rows.push((h.k, String::new(), false, Some(h.scaled_max()), String::new()));
        }
    }
    rows.sort_by(|x, y| x.0.total_cmp(&y.0).then_with(|| x.1.cmp(&y.1)));

    let mut table = Table::new(
        "flatbands",
        &["k", "energy", "mechanism", "predicted", "detected", "scaled_max", "provenance"],
    );
    let unconfirmed = rows.iter().filter(|r| r.2 && r.3.is_none()).count();
    for (k, mechanism, pred, hit, provenance) in rows {
        table.push(vec![
            k.into(),
            (k * k).into(),
            mechanism.into(),
            pred.into(),
            hit.is_some().into(),
            hit.into(),
            provenance.into(),
        ]);
    }
    table.parameters = json!({ "spec": spec_json(&args.spec), "kmax": args.kmax });
    table.tolerances = json!({ "flat_eps": ringchain::model::FLAT_EPS, "same_point": SAME_POINT });
    table.notes = predicted.notices.clone();
    let mut report = Report::new(table);
    report.summary.push(format!(
        "{} flat points detected, {} predicted, {} predictions not confirmed",
        hits.len(),
        predicted.predictions.len(),
        unconfirmed
    ));
    report.plot = Some((format!("{} chain flat bands", spec.variant()), PlotKind::Impulses { x: 1, label: "k" }));
    Ok(report)
}

/// `ℓ₂/ℓ₃` for the tight chain or `ℓ₁/π` for the merged chain, from exact
/// π-multiples when given, else by rational recognition.
fn periodic_ratio(args: &ProbArgs, variant: Variant) -> Result<Ratio, CliError> {
    if let Some(r) = args.ratio {
        return Ok(r);
    }
    let missing = || {
        usage("the periodic route needs --ratio, or a length that is a rational multiple of π (for example --l3 2pi/3)")
    };
    match variant {
        Variant::Tight => {
            let l3 = args.spec.l3.ok_or_else(missing)?;
            // ℓ₃ = πp/q gives ℓ₂/ℓ₃ = (2q − p)/p.
            let r = match l3.pi_multiple {
                Some(r) => r,
                None => recognize(l3.value / PI, MAX_DENOMINATOR, MATCH_TOL).ok_or_else(missing)?,
            };
            let (p, q) = (r.num, r.den as i64);
            if p <= 0 || p >= 2 * q {
                return Err(usage("ℓ₃ must lie strictly between 0 and 2π"));
            }
            Ok(Ratio::new(2 * q - p, p as u64))
        }
        Variant::Merged => {
            let l1 = args.spec.l1.ok_or_else(missing)?;
            match l1.pi_multiple {
                Some(r) => Ok(r),
                None => recognize(l1.value / PI, MAX_DENOMINATOR, MATCH_TOL).ok_or_else(missing),
            }
        }
        Variant::Loose => Err(usage("the periodic route needs the tight or merged chain")),
    }
}

pub fn prob(args: &ProbArgs) -> Result<Report, CliError> {
    let variant = Variant::from(args.spec.variant);
    let fluxes = match (&args.flux_range, args.spec.flux) {
        (Some(_), Some(_)) => return Err(usage("give either --A or --flux-range, not both")),
        (Some(r), None) => parse_grid(r, parse_number).map_err(usage)?,
        (None, Some(a)) => vec![a],
        (None, None) => return Err(usage("--A or --flux-range is required")),
    };
    if args.symmetric && variant != Variant::Tight {
        return Err(usage("--symmetric applies to the tight chain only"));
    }
    if args.symmetric && args.spec.l3.is_some_and(|l| (l.value - PI).abs() > 1e-12) {
        return Err(usage("--symmetric means ℓ₃ = π"));
    }
    let estimate = |a: f64| -> Result<ProbabilityEstimate, CliError> {
        let e = match args.mode {
            Mode::Closed => {
                if !args.incommensurate && !args.symmetric {
                    return Err(usage(
                        "closed forms hold for incommensurate lengths only; pass --incommensurate to declare them",
                    ));
                }
                closed_form_probability(variant, a, args.symmetric)?
            }
            Mode::Torus => {
                let opts = TorusOptions {
                    resolution: args.resolution,
                    mc_samples: args.samples,
                    seed: args.seed,
                };
                torus_probability(variant, a, &opts)?
            }
            Mode::Scan => {
                let k_max = args.kmax.ok_or_else(|| usage("the scan route needs --kmax"))?;
                let mut spec_args = args.spec.clone();
                spec_args.flux = Some(a);
                scan_probability(&build_spec(&spec_args)?, k_max, None)?
            }
            Mode::Periodic => {
                let ratio = periodic_ratio(args, variant)?;
                periodic_probability(variant, a, ratio, args.spec.ell.value)?
            }
        };
        Ok(e)
    };

    let mut table = Table::new(
        "prob",
        &["A", "value", "error_bound", "method", "cross_check", "k_max", "resolution", "samples", "period"],
    );
    let mut summary = Vec::new();
    for &a in &fluxes {
        let e = estimate(a)?;
        summary.push(format!("A = {a}: P = {:.12} ± {:.3e} ({})", e.value, e.error_bound, e.method));
        let i = &e.inputs;
        table.push(vec![
            a.into(),
            e.value.into(),
            e.error_bound.into(),
            e.method.to_string().into(),
            i.cross_check.into(),
            i.k_max.into(),
            i.resolution.map_or(Cell::Empty, Cell::from),
            i.samples.map_or(Cell::Empty, |s| Cell::Int(s as i64)),
            i.period.into(),
        ]);
    }
    table.parameters = json!({
        "spec": spec_json(&args.spec),
        "mode": format!("{:?}", args.mode).to_lowercase(),
        "flux_range": args.flux_range,
        "kmax": args.kmax,
        "resolution": args.resolution,
        "samples": args.samples,
        "ratio": args.ratio.map(|r| r.to_string()),
        "symmetric": args.symmetric,
        "incommensurate": args.incommensurate,
    });
    table.seed = Some(args.seed);
    table.tolerances = json!({ "rational_match": MATCH_TOL, "max_denominator": MAX_DENOMINATOR });
    let mut report = Report::new(table);
    report.summary = summary;
    report.plot = Some((
        format!("{variant} chain spectral probability"),
        PlotKind::Curve { x: 1, y: 2, err: 3, xlabel: "A", ylabel: "P" },
    ));
    Ok(report)
}

pub fn sweep(args: &SweepArgs) -> Result<Report, CliError> {
    let parse = match args.axis {
        Axis::Flux => parse_number,
        _ => parse_length_value,
    };
    let grid = parse_grid(&args.range, parse).map_err(usage)?;
    if !(args.kmax > 0.0) || !(args.points_per_unit > 0.0) {
        return Err(usage("--kmax and --points-per-unit must be positive"));
    }
    let opts = ScanOptions::for_range(args.kmax)
        .with_grid((args.points_per_unit * args.kmax).ceil().max(2.0) as usize)
        .with_edge_tol(args.edge_tol);
    let (branch, lo_name) = match args.branch {
        BranchArg::Positive => ("positive", "k"),
        BranchArg::Negative => ("negative", "kappa"),
    };
    let mut table = Table::new(
        "sweep",
        &["param", "branch", "band", "lo", "hi", "energy_lo", "energy_hi", "kind"],
    );
    let mut notes = Vec::new();
    let mut total = 0;
    for &v in &grid {
        let mut s = args.spec.clone();
        match args.axis {
            Axis::Flux => s.flux = Some(v),
            Axis::Ell => s.ell = Length::plain(v),
            Axis::L1 => s.l1 = Some(Length::plain(v)),
            Axis::L3 => s.l3 = Some(Length::plain(v)),
        }
        let spec = build_spec(&s)?;
        let scan: BandScan = match args.branch {
            BranchArg::Positive => scan_bands(&spec, args.kmax, &opts)?,
            BranchArg::Negative => find_negative_bands(&spec, args.kmax, &opts)?,
        };
        notes.extend(scan.warnings.iter().map(|w| format!("{v}: {w}")));
        total += scan.bands.len();
        for (i, b) in scan.bands.iter().enumerate() {
            let (e_lo, e_hi) = match args.branch {
                BranchArg::Positive => (b.lo * b.lo, b.hi * b.hi),
                BranchArg::Negative => (-b.hi * b.hi, -b.lo * b.lo),
            };
            table.push(vec![
                v.into(),
                branch.into(),
                (i + 1).into(),
                b.lo.into(),
                b.hi.into(),
                e_lo.into(),
                e_hi.into(),
                kind_name(b.kind).into(),
            ]);
        }
    }
    let axis = match args.axis {
        Axis::Flux => "A",
        Axis::Ell => "ell",
        Axis::L1 => "l1",
        Axis::L3 => "l3",
    };
    table.parameters = json!({
        "spec": spec_json(&args.spec),
        "axis": axis,
        "range": args.range,
        "kmax": args.kmax,
        "branch": branch,
        "momentum": lo_name,
    });
    table.tolerances = scan_tolerances(&opts);
    table.notes = notes;
    let mut report = Report::new(table);
    report.summary.push(format!("{} parameter values, {total} bands", grid.len()));
    report.plot = Some((
        format!("{} chain, {branch} bands along {axis}", Variant::from(args.spec.variant)),
        PlotKind::BandMap { x: 1, lo: 6, hi: 7, xlabel: axis, ylabel: "energy" },
    ));
    Ok(report)
}

pub fn oracle_check(args: &OracleArgs) -> Result<Report, CliError> {
    if !(args.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let samples = random_samples(args.samples, args.seed);
    let r = equivalence_report(&samples, args.theta_samples, args.tol, args.seed)?;
    let mut table = Table::new(
        "oracle-check",
        &[
            "samples",
            "roots_compared",
            "all_theta_samples",
            "max_location_error",
            "max_ratio_spread",
            "failures",
            "tolerance",
        ],
    );
    table.push(vec![
        r.samples.into(),
        r.roots_compared.into(),
        r.all_theta_samples.into(),
        r.max_location_error.into(),
        r.max_ratio_spread.into(),
        r.failures.len().into(),
        r.tolerance.into(),
    ]);
    table.parameters = json!({ "samples": args.samples, "theta_samples": args.theta_samples });
    table.seed = Some(args.seed);
    table.tolerances = json!({ "location": args.tol });
    table.details = Some(json!({ "failures": serde_json::to_value(&r.failures).map_err(CliError::output)? }));
    let mut report = Report::new(table);
    report.summary.push(format!(
        "{} samples, {} θ-roots compared, max location error {:.3e}, {} failures",
        r.samples,
        r.roots_compared,
        r.max_location_error,
        r.failures.len()
    ));
    if !r.passed() {
        report.failure = Some(CliError::Numerical(format!(
            "{} samples disagree beyond {}",
            r.failures.len(),
            args.tol
        )));
    }
    Ok(report)
}
