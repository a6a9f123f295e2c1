use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mapgf::family::{Family, FamilySpec, Statistic};
use mapgf::maps::{classify, enumerate_maps, oracle_series, oracle_series_all, DEFAULT_LIMIT, HARD_LIMIT};
use mapgf::pipeline::{face_clt, family_counts, two_gon_clt, CltReport};
use mapgf::scheme::{builtin_schemes, find_scheme, InnerSeries, SchemeResidual, SchemeSpec};
use mapgf::series::{MultiSeries, Rational};
use mapgf::singular::{estimate_singularity, invert_germ, transfer, SingularGerm, DEFAULT_STEP};
use serde::Serialize;

use crate::config::{parse_format, parse_step, FileConfig, Format};
use crate::sources::{capability, family_series, Source};
use crate::{Cli, Command, GermOp, MapOp, OutArgs, StatArgs, ESTIMATOR_WARNING, VERIFY_FAILED};

const DEFAULT_ORDER: usize = 6;
const DEFAULT_ESTIMATE_ORDER: usize = 60;
const DEFAULT_MAX_SPREAD: f64 = 1e-6;
/// Largest relative gap between the CLT mean and the extrapolated mean.
const MEAN_TOLERANCE: f64 = 0.01;

struct Settings {
    file: FileConfig,
    oracle_cap: usize,
}

impl Settings {
    fn family(&self, flag: Option<&str>) -> Result<Family> {
        let name = flag.or(self.file.family.as_deref()).context("--family is required")?;
        Ok(name.parse()?)
    }

    fn order(&self, flag: Option<usize>, default: usize) -> Result<usize> {
        let n = flag.or(self.file.order).unwrap_or(default);
        if n == 0 {
            bail!("order must be at least 1");
        }
        Ok(n)
    }

    fn step(&self, flag: Option<&str>) -> Result<Rational> {
        match flag.or(self.file.step.as_deref()) {
            Some(s) => parse_step(s),
            None => Ok(Rational::new(DEFAULT_STEP.0.into(), DEFAULT_STEP.1.into())),
        }
    }

    fn format(&self, out: &OutArgs, default: Format) -> Result<Format> {
        out.format.as_deref().or(self.file.format.as_deref()).map_or(Ok(default), parse_format)
    }

    fn out_path(&self, out: Option<&Path>) -> Option<PathBuf> {
        out.map(Path::to_path_buf).or_else(|| self.file.out.clone())
    }

    fn max_spread(&self, flag: Option<f64>) -> f64 {
        flag.or(self.file.max_spread).unwrap_or(DEFAULT_MAX_SPREAD)
    }

    fn stats(&self, args: &StatArgs) -> Result<Vec<Statistic>> {
        let from_flags = !(args.stat.is_empty() && args.face.is_empty() && args.ellgon.is_empty() && !args.root_degree);
        let names: &[String] = if from_flags { &args.stat } else { &self.file.stats };
        let mut v = Vec::new();
        if args.root_degree {
            v.push(Statistic::RootDegree);
        }
        v.extend(args.face.iter().map(|&l| Statistic::Faces(l)));
        v.extend(args.ellgon.iter().map(|&l| Statistic::Gons(l)));
        for n in names {
            v.push(Statistic::from_marker_name(n)?);
        }
        Ok(v)
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn run(cli: Cli) -> Result<u8> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let oracle_cap = cli.oracle_cap.or(file.oracle_cap).unwrap_or(DEFAULT_LIMIT);
    if oracle_cap > HARD_LIMIT {
        bail!("oracle cap {oracle_cap} exceeds the hard limit {HARD_LIMIT}");
    }
    let cfg = Settings { file, oracle_cap };
    match cli.command {
        Command::Series { family, order, stats, source, out } => series(&cfg, family, order, &stats, source, &out),
        Command::Verify { scheme, all, order, oracle, golden, write_golden, out } => {
            let golden = golden.or_else(|| cfg.file.golden.clone());
            verify(&cfg, scheme, all, order, oracle, golden.as_deref(), write_golden.as_deref(), &out)
        }
        Command::Singularity { family, order, face, step, max_spread, out } => {
            singularity(&cfg, family, order, face, step.as_deref(), max_spread, &out)
        }
        Command::Clt { family, face, ellgon, order, step, max_spread, out } => {
            clt(&cfg, family.as_deref(), face, ellgon, order, step.as_deref(), max_spread, &out)
        }
        Command::Germ { op } => germ(op),
        Command::Map { op: MapOp::Dump { size, family, out } } => dump(&cfg, size, family.as_deref(), out.as_deref()),
    }
}

fn series(
    cfg: &Settings,
    family: Option<String>,
    order: Option<usize>,
    stats: &StatArgs,
    source: Source,
    out: &OutArgs,
) -> Result<u8> {
    let family = cfg.family(family.as_deref())?;
    let order = cfg.order(order, DEFAULT_ORDER)?;
    let stats = cfg.stats(stats)?;
    let (s, used) = family_series(family, &stats, order, source, cfg.oracle_cap)?;
    eprintln!("{family} to order {order} from {}", used.name());
    let text = match cfg.format(out, Format::Json)? {
        Format::Json => json(&s.to_json())?,
        Format::Text => format!("{s}\n"),
        Format::Csv => bail!("series are written as json or text"),
    };
    emit(cfg.out_path(out.out.as_deref()).as_deref(), &text)?;
    Ok(0)
}

fn read_series(path: &Path) -> Result<MultiSeries> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    MultiSeries::from_json(&value).with_context(|| format!("series in {}", path.display()))
}

fn write_series(path: &Path, s: &MultiSeries) -> Result<()> {
    fs::write(path, json(&s.to_json())?).with_context(|| format!("writing {}", path.display()))
}

fn oracle_side(cache: &OracleCache, spec: &FamilySpec, order: usize, cap: usize) -> Result<MultiSeries> {
    if order > cap {
        return capability(format!("map-oracle: order {order} exceeds the enumeration cap {cap}"));
    }
    match cache.get(spec) {
        Some(s) => Ok(s),
        None => Ok(oracle_series(spec, order, cap)?),
    }
}

/// Oracle series of every family spec the schemes need, from one enumeration.
struct OracleCache(Vec<(FamilySpec, MultiSeries)>);

impl OracleCache {
    fn build(schemes: &[SchemeSpec], order: usize, cap: usize, wanted: bool) -> Result<Self> {
        if !wanted || order > cap {
            return Ok(OracleCache(Vec::new()));
        }
        let mut specs: Vec<FamilySpec> = Vec::new();
        for s in schemes {
            for f in [&s.inner, &s.outer] {
                if !specs.contains(f) {
                    specs.push(f.clone());
                }
            }
        }
        let series = oracle_series_all(&specs, order, cap)?;
        Ok(OracleCache(specs.into_iter().zip(series).collect()))
    }

    fn get(&self, spec: &FamilySpec) -> Option<MultiSeries> {
        self.0.iter().find(|(f, _)| f == spec).map(|(_, s)| s.clone())
    }
}

fn verify_one(
    cfg: &Settings,
    cache: &OracleCache,
    s: &SchemeSpec,
    order: usize,
    oracle: bool,
    golden: Option<&Path>,
    write_golden: Option<&Path>,
) -> Result<SchemeResidual> {
    let golden_dir = golden.map(|g| g.join(&s.id));
    let golden_inner = golden_dir.as_ref().map(|d| d.join("inner.json")).filter(|p| p.exists());
    let inner = match golden_inner {
        Some(p) => read_series(&p)?,
        None if oracle => oracle_side(cache, &s.inner, order, cfg.oracle_cap)?,
        None => match cache.get(&s.inner) {
            Some(i) => i,
            None => family_series(s.inner.family, &s.inner.stats, order, Source::Auto, cfg.oracle_cap)?.0,
        },
    };
    let inner = InnerSeries::Full(inner);
    let outer = match &golden_dir {
        Some(d) => read_series(&d.join("outer.json"))?,
        None if oracle => oracle_side(cache, &s.outer, order, cfg.oracle_cap)?,
        None => s.extract_outer(&inner, order)?,
    };
    if let Some(dir) = write_golden {
        let d = dir.join(&s.id);
        fs::create_dir_all(&d).with_context(|| format!("creating {}", d.display()))?;
        let InnerSeries::Full(i) = &inner else { unreachable!() };
        write_series(&d.join("inner.json"), i)?;
        write_series(&d.join("outer.json"), &outer)?;
    }
    Ok(s.verify(&inner, &outer, order)?)
}

#[allow(clippy::too_many_arguments)]
fn verify(
    cfg: &Settings,
    ids: Vec<String>,
    all: bool,
    order: Option<usize>,
    oracle: bool,
    golden: Option<&Path>,
    write_golden: Option<&Path>,
    out: &OutArgs,
) -> Result<u8> {
    let order = cfg.order(order, DEFAULT_ORDER)?;
    let schemes: Vec<SchemeSpec> = if all {
        builtin_schemes(2 * order)
    } else if ids.is_empty() {
        bail!("give --scheme ID or --all");
    } else {
        ids.iter().map(|id| find_scheme(id, 2 * order)).collect::<Result<_, _>>()?
    };
    let needs_oracle = golden.is_none() || oracle;
    let cache = OracleCache::build(&schemes, order, cfg.oracle_cap, needs_oracle)?;
    let mut reports = Vec::new();
    let mut failed = 0;
    for s in &schemes {
        let r = verify_one(cfg, &cache, s, order, oracle, golden, write_golden).with_context(|| format!("scheme {}", s.id))?;
        match &r.first_failing {
            None => eprintln!("PASS {} to order {order}", s.id),
            Some((n, mono, c)) => {
                failed += 1;
                let at: Vec<String> = r.markers.iter().zip(mono).map(|(m, e)| format!("{m}^{e}")).collect();
                eprintln!("FAIL {}: residual {c} at z^{n} {}", s.id, at.join(" "));
            }
        }
        reports.push(r);
    }
    emit(cfg.out_path(out.out.as_deref()).as_deref(), &json(&reports)?)?;
    Ok(if failed == 0 { 0 } else { VERIFY_FAILED })
}

/// One row of the estimate table.
#[derive(Serialize)]
struct EstimateRow {
    family: Family,
    marker: String,
    rho: f64,
    exponent: f64,
    mu: Option<f64>,
    sigma2: Option<f64>,
    spread: f64,
}

const CSV_HEADER: &str = "family,marker,rho,exponent,mu,sigma2,spread\n";

fn csv_rows(rows: &[EstimateRow]) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut s = CSV_HEADER.to_string();
    for r in rows {
        s += &format!("{},{},{},{},{},{},{:e}\n", r.family, r.marker, r.rho, r.exponent, opt(r.mu), opt(r.sigma2), r.spread);
    }
    s
}

fn write_rows(cfg: &Settings, rows: &[EstimateRow], out: &OutArgs) -> Result<()> {
    let text = match cfg.format(out, Format::Csv)? {
        Format::Csv => csv_rows(rows),
        Format::Json => json(&rows)?,
        Format::Text => bail!("estimates are written as csv or json"),
    };
    emit(cfg.out_path(out.out.as_deref()).as_deref(), &text)
}

fn singularity(
    cfg: &Settings,
    families: Vec<String>,
    order: Option<usize>,
    face: Option<usize>,
    step: Option<&str>,
    max_spread: Option<f64>,
    out: &OutArgs,
) -> Result<u8> {
    let order = cfg.order(order, DEFAULT_ESTIMATE_ORDER)?;
    let families: Vec<Family> = if families.is_empty() {
        match &cfg.file.family {
            Some(f) => vec![f.parse()?],
            None => Family::ALL.to_vec(),
        }
    } else {
        families.iter().map(|f| f.parse()).collect::<Result<_, _>>()?
    };
    let h = cfg.step(step)?;
    let limit = cfg.max_spread(max_spread);
    let mut rows = Vec::new();
    for f in families {
        let e = estimate_singularity(&family_counts(f, order)?)?;
        let mut row = EstimateRow {
            family: f,
            marker: String::new(),
            rho: e.rho,
            exponent: e.exponent,
            mu: None,
            sigma2: None,
            spread: e.rho_spread,
        };
        if let Some(l) = face {
            let r = face_clt(f, l, order, &h)?;
            row.marker = r.marker;
            row.mu = Some(r.clt.mu);
            row.sigma2 = Some(r.clt.sigma2);
            row.spread = row.spread.max(r.clt.spread);
        }
        rows.push(row);
    }
    write_rows(cfg, &rows, out)?;
    let noisy: Vec<String> = rows.iter().filter(|r| r.spread.is_nan() || r.spread > limit).map(|r| r.family.to_string()).collect();
    if noisy.is_empty() {
        Ok(0)
    } else {
        eprintln!("warning: spread above {limit:e} for {}", noisy.join(", "));
        Ok(ESTIMATOR_WARNING)
    }
}

#[allow(clippy::too_many_arguments)]
fn clt(
    cfg: &Settings,
    family: Option<&str>,
    face: Option<usize>,
    ellgon: Option<usize>,
    order: Option<usize>,
    step: Option<&str>,
    max_spread: Option<f64>,
    out: &OutArgs,
) -> Result<u8> {
    let family = cfg.family(family)?;
    let h = cfg.step(step)?;
    let report: CltReport = match (face, ellgon) {
        (Some(l), None) => face_clt(family, l, cfg.order(order, DEFAULT_ESTIMATE_ORDER)?, &h)?,
        (None, Some(2)) if family == Family::M1 => two_gon_clt(cfg.order(order, 40)?, &h)?,
        (None, Some(_)) => return capability("singularity-lab: pure l-gon CLT is computed for 2-gons in M1"),
        _ => bail!("give exactly one of --face and --ellgon"),
    };
    let mut warnings = Vec::new();
    let limit = cfg.max_spread(max_spread);
    if report.clt.spread.is_nan() || report.clt.spread > limit {
        warnings.push(format!("radius spread {:e} above {limit:e}", report.clt.spread));
    }
    let gap = if report.mean_limit == 0.0 { report.clt.mu.abs() } else { (report.clt.mu / report.mean_limit - 1.0).abs() };
    if gap.is_nan() || gap > MEAN_TOLERANCE {
        warnings.push(format!("mean {} differs from the extrapolated mean {} by {gap:e}", report.clt.mu, report.mean_limit));
    }
    match cfg.format(out, Format::Json)? {
        Format::Json => emit(cfg.out_path(out.out.as_deref()).as_deref(), &json(&report)?)?,
        Format::Csv => {
            let e = estimate_singularity(&family_counts(family, report.order)?)?;
            let row = EstimateRow {
                family,
                marker: report.marker.clone(),
                rho: report.clt.rho[1],
                exponent: e.exponent,
                mu: Some(report.clt.mu),
                sigma2: Some(report.clt.sigma2),
                spread: report.clt.spread,
            };
            emit(cfg.out_path(out.out.as_deref()).as_deref(), &csv_rows(&[row]))?
        }
        Format::Text => bail!("CLT reports are written as json or csv"),
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    Ok(if warnings.is_empty() { 0 } else { ESTIMATOR_WARNING })
}

fn read_germ(path: &Path) -> Result<SingularGerm> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("germ in {}", path.display()))
}

fn germ(op: GermOp) -> Result<u8> {
    match op {
        GermOp::Invert { input, out } => {
            let g = invert_germ(&read_germ(&input)?)?;
            emit(out.as_deref(), &json(&g)?)?;
        }
        GermOp::Transfer { f1, f2, out } => {
            let t = transfer(&read_germ(&f1)?, &read_germ(&f2)?)?;
            emit(out.as_deref(), &json(&t)?)?;
        }
    }
    Ok(0)
}

fn dump(cfg: &Settings, size: usize, family: Option<&str>, out: Option<&Path>) -> Result<u8> {
    let family: Family = family.or(cfg.file.family.as_deref()).unwrap_or("M1").parse()?;
    let maps = enumerate_maps(size, cfg.oracle_cap, |m| family.contains(&classify(m)))?;
    let mut lines: Vec<String> = maps.iter().map(|m| m.dump()).collect();
    lines.sort();
    let mut text = lines.join("\n");
    if !text.is_empty() {
        text.push('\n');
    }
    emit(cfg.out_path(out).as_deref(), &text)?;
    Ok(0)
}
