use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use fup_core::baker::{self, BakerAlphabet, BakerOperator, BumpRegion, CutoffProfile};
use fup_core::cantor::{iterate, upper_right_neighborhood, Alphabet2D, GridSet};
use fup_core::dft::{self, Dim, GridFunction};
use fup_core::lines::{self, Direction, Line, PairVerdict};
use fup_core::polymethod::{self, BivarPoly, Localization};
use fup_core::{FupError, ResourceCaps, VERSION};
use num_complex::Complex64;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{BatteryArgs, Command, CutoffArgs, Format, RunConfig, Span};
use crate::expr::{parse_poly, render};
use crate::CliError;

const CONTRACTION_TOL: f64 = 1e-9;

/// A command's result: JSON always, CSV for tabular commands.
pub struct Output {
    pub result: Value,
    pub csv: Option<String>,
}

struct Ctx<'a> {
    config: &'a RunConfig,
    inputs: BTreeMap<String, Value>,
}

fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types serialise")
}

fn csv_rows<T: Serialize>(rows: impl IntoIterator<Item = T>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory CSV");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("CSV is UTF-8")
}

impl Ctx<'_> {
    fn caps(&self) -> &ResourceCaps {
        &self.config.caps
    }

    fn load<T: DeserializeOwned + Serialize>(&mut self, role: &str, path: &Path) -> Result<T, CliError> {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        let v: T = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        self.inputs.insert(role.into(), to_value(&v));
        Ok(v)
    }

    fn poly(&mut self, role: &str, src: &str) -> Result<BivarPoly, CliError> {
        if let Some(path) = src.strip_prefix('@') {
            return self.load(role, Path::new(path));
        }
        let p = parse_poly(src).map_err(|e| usage(format!("--{role}: {e}")))?.parsed;
        self.inputs.insert(role.into(), to_value(&p));
        Ok(p)
    }

    fn violation(&self, message: String, detail: Value) -> CliError {
        let payload = json!({
            "version": VERSION,
            "config": self.config,
            "inputs": self.inputs,
            "error": message,
            "detail": detail,
        });
        CliError::Violation { message, payload: Box::new(payload) }
    }

    fn core(&self, e: FupError) -> CliError {
        match e {
            FupError::ResourceCap { .. } => CliError::Cap(e.to_string()),
            FupError::TheoremViolation(_) | FupError::ConstructionFailed { .. } => {
                self.violation(e.to_string(), Value::Null)
            }
            other => usage(other.to_string()),
        }
    }
}

/// Runs the configured command and renders its artifact.
pub fn run(config: &RunConfig) -> Result<String, CliError> {
    config.validate()?;
    let mut ctx = Ctx { config, inputs: BTreeMap::new() };
    let out = dispatch(&mut ctx).map_err(|e| match e {
        Failure::Cli(e) => e,
        Failure::Core(e) => ctx.core(e),
    })?;
    Ok(match config.format {
        Format::Json => {
            let envelope = json!({ "version": VERSION, "config": config, "result": out.result });
            serde_json::to_string_pretty(&envelope).expect("JSON values serialise") + "\n"
        }
        Format::Csv => out.csv.expect("validated to have a CSV form"),
    })
}

enum Failure {
    Cli(CliError),
    Core(FupError),
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        Failure::Cli(e)
    }
}

impl From<FupError> for Failure {
    fn from(e: FupError) -> Self {
        Failure::Core(e)
    }
}

type Res<T> = Result<T, Failure>;

fn json_only(result: Value) -> Res<Output> {
    Ok(Output { result, csv: None })
}

fn dispatch(ctx: &mut Ctx) -> Res<Output> {
    let command = ctx.config.command.clone();
    match &command {
        Command::Norm { x, y, a, b, k } => match (x, y, a, b, k) {
            (Some(x), Some(y), None, None, None) => norm_sets(ctx, x, y),
            (None, None, Some(a), Some(b), Some(k)) => norm_alphabets(ctx, a, b, *k),
            _ => Err(usage("norm takes either --x and --y, or --a, --b and --k").into()),
        },
        Command::Beta { a, b, kmax } => beta(ctx, a, b, *kmax),
        Command::LineCheck { a, v } => {
            let a: Alphabet2D = ctx.load("a", a)?;
            let dirs = match v {
                Some(v) => vec![Direction::new(v.0, v.1)?],
                None => Direction::enumerate(a.m() as i64),
            };
            line_check(&a, &dirs)
        }
        Command::Orthopair { a, b } => {
            let a: Alphabet2D = ctx.load("a", a)?;
            let b: Alphabet2D = ctx.load("b", b)?;
            json_only(to_value(&lines::orthogonal_pair_condition(&a, &b)?))
        }
        Command::FullRange { a, b } => {
            let a: Alphabet2D = ctx.load("a", a)?;
            let b: Alphabet2D = ctx.load("b", b)?;
            let verdict = lines::full_range_condition(&a, &b)?;
            json_only(json!({ "AB": a.len() * b.len(), "M2": a.m() * a.m(), "verdict": verdict }))
        }
        Command::Sharpness { a, b, k, v } => sharpness(ctx, a, b, *k, v.map(|v| (v.0, v.1))),
        Command::Localize { f: Some(f), .. } => {
            let f: GridFunction = ctx.load("f", f)?;
            ctx.caps().check_grid(f.n() * f.n())?;
            let loc = polymethod::localize_to_line(&f)?;
            let failures = check_localization(&f, &loc)?;
            if !failures.is_empty() {
                return Err(ctx.violation("localisation postconditions failed".into(), json!(failures)).into());
            }
            json_only(json!({
                "N": f.n(),
                "support": f.support().len(),
                "line": loc.line,
                "radius": loc.radius,
                "multiplier": loc.multiplier,
                "g": loc.g,
            }))
        }
        Command::Localize { f: None, battery } => localize_battery(ctx, battery),
        Command::Separate { set: Some(s), .. } => {
            let s: GridSet = ctx.load("set", s)?;
            ctx.caps().check_grid(s.n() * s.n())?;
            let sep = polymethod::separating_poly(&s)?;
            let survivors =
                check_separation(&s, &sep.poly, &sep.line, sep.radius).map_err(|m| ctx.violation(m, to_value(&s)))?;
            json_only(json!({
                "N": s.n(),
                "size": s.len(),
                "poly": sep.poly,
                "expression": render(&sep.poly),
                "degree": sep.poly.degree(),
                "line": sep.line,
                "radius": sep.radius,
                "survivors": survivors,
            }))
        }
        Command::Separate { set: None, battery } => separate_battery(ctx, battery),
        Command::CycloCount { poly, nmin, nmax } => {
            let f = ctx.poly("poly", poly)?;
            ctx.caps().check_grid(nmax * nmax)?;
            cyclo_count(&f, *nmin, *nmax)
        }
        Command::SevenCover { poly, nmin, nmax } => {
            let f = ctx.poly("poly", poly)?;
            ctx.caps().check_grid(nmax * nmax)?;
            seven_cover(ctx, &f, *nmin, *nmax)
        }
        Command::Bezout { f, g, n } => {
            let f = ctx.poly("f", f)?;
            let g = ctx.poly("g", g)?;
            ctx.caps().check_grid(n * n)?;
            json_only(to_value(&polymethod::bezout_intersection(&f, &g, *n)?))
        }
        Command::BakerBuild { alphabet, k, cutoff } => {
            let alphabet: BakerAlphabet = ctx.load("alphabet", alphabet)?;
            let cutoff = profile(cutoff)?;
            let b = baker::build_baker(&alphabet, *k, &cutoff, ctx.caps())?;
            let norm = b.operator_norm();
            check_contraction(ctx, &b, norm)?;
            json_only(json!({
                "M": alphabet.m(),
                "k": k,
                "N": b.n,
                "dim": b.dim().as_u8(),
                "side": b.matrix.nrows(),
                "cutoff": cutoff,
                "smooth": cutoff.is_smooth(),
                "norm": norm,
                "spectral_radius": b.spectral_radius(),
            }))
        }
        Command::BakerSpectrum { alphabet, kmin, kmax, cutoff } => {
            let alphabet: BakerAlphabet = ctx.load("alphabet", alphabet)?;
            baker_spectrum(ctx, &alphabet, *kmin, *kmax, &profile(cutoff)?)
        }
        Command::Propagation { alphabet, phi, psi, kmin, kmax, cutoff } => {
            let alphabet: BakerAlphabet = ctx.load("alphabet", alphabet)?;
            propagation(ctx, &alphabet, phi, psi, *kmin, *kmax, &profile(cutoff)?)
        }
    }
}

fn profile(c: &CutoffArgs) -> Res<CutoffProfile> {
    let repr = json!({ "kind": c.kind.to_string(), "flat": c.flat, "sampling": c.sampling });
    serde_json::from_value(repr).map_err(|e| usage(format!("cutoff: {e}")).into())
}

fn norm_sets(ctx: &mut Ctx, x: &Path, y: &Path) -> Res<Output> {
    let x: GridSet = ctx.load("x", x)?;
    let y: GridSet = ctx.load("y", y)?;
    if x.n() != y.n() {
        return Err(usage(format!("grid sizes differ: {} and {}", x.n(), y.n())).into());
    }
    ctx.caps().check_grid(x.n() * x.n())?;
    ctx.caps().check_dense(x.len().max(y.len()))?;
    json_only(json!({ "N": x.n(), "norm": dft::fup_norm(&x, &y)? }))
}

fn alphabet_pair(ctx: &mut Ctx, a: &Path, b: &Path) -> Res<(BakerAlphabet, BakerAlphabet)> {
    let a: BakerAlphabet = ctx.load("a", a)?;
    let b: BakerAlphabet = ctx.load("b", b)?;
    if a.dim() != b.dim() || a.m() != b.m() {
        return Err(usage("alphabets must share base and dimension").into());
    }
    Ok((a, b))
}

fn check_iterate_sizes(ctx: &Ctx, a: &BakerAlphabet, b: &BakerAlphabet, k: u32) -> Res<()> {
    let grid = a.m().checked_pow(k * a.dim().as_u8() as u32).unwrap_or(usize::MAX);
    ctx.caps().check_grid(grid)?;
    let largest = a.letters().len().max(b.letters().len());
    ctx.caps().check_dense(largest.checked_pow(k).unwrap_or(usize::MAX))?;
    Ok(())
}

fn norm_alphabets(ctx: &mut Ctx, a: &Path, b: &Path, k: u32) -> Res<Output> {
    let (a, b) = alphabet_pair(ctx, a, b)?;
    check_iterate_sizes(ctx, &a, &b, k)?;
    let (n, norm) = match (&a, &b) {
        (BakerAlphabet::Two(a), BakerAlphabet::Two(b)) => {
            let (x, y) = (iterate(a, k)?, iterate(b, k)?);
            (x.n(), dft::fup_norm(x.points(), y.points())?)
        }
        (BakerAlphabet::One(a), BakerAlphabet::One(b)) => {
            let n = a.m().pow(k);
            (n, dft::fup_norm_1d(n, &a.iterate(k), &b.iterate(k)))
        }
        _ => unreachable!("dimensions checked"),
    };
    json_only(json!({
        "M": a.m(),
        "k": k,
        "N": n,
        "norm": norm,
        "beta_k": dft::beta_from_norm(norm, a.m(), k),
    }))
}

fn beta(ctx: &mut Ctx, a: &Path, b: &Path, kmax: u32) -> Res<Output> {
    let (a, b) = alphabet_pair(ctx, a, b)?;
    check_iterate_sizes(ctx, &a, &b, kmax)?;
    let series = match (&a, &b) {
        (BakerAlphabet::Two(a), BakerAlphabet::Two(b)) => dft::beta_series(a, b, kmax, ctx.caps())?,
        (BakerAlphabet::One(a), BakerAlphabet::One(b)) => dft::beta_series_1d(a, b, kmax, ctx.caps())?,
        _ => unreachable!("dimensions checked"),
    };
    Ok(Output { csv: Some(csv_rows(&series.entries)), result: to_value(&series) })
}

fn line_check(a: &Alphabet2D, dirs: &[Direction]) -> Res<Output> {
    #[derive(Serialize)]
    struct Row {
        a: i64,
        b: i64,
        found: bool,
        kind: String,
        x: String,
        y: String,
    }
    let found: Vec<_> = dirs.iter().map(|&v| (v, lines::line_in_cantor(a, v))).collect();
    let rows = found.iter().map(|(v, w)| Row {
        a: v.a(),
        b: v.b(),
        found: w.is_some(),
        kind: w.as_ref().map_or(String::new(), |w| to_value(&w.kind).as_str().unwrap_or_default().to_string()),
        x: w.as_ref().map_or(String::new(), |w| w.offset.x.to_string()),
        y: w.as_ref().map_or(String::new(), |w| w.offset.y.to_string()),
    });
    let csv = csv_rows(rows);
    let result = json!({
        "M": a.m(),
        "lines": found.iter().map(|(v, w)| json!({ "v": v, "witness": w })).collect::<Vec<_>>(),
    });
    Ok(Output { result, csv: Some(csv) })
}

fn sharpness(ctx: &mut Ctx, a: &Path, b: &Path, k: u32, v: Option<(i64, i64)>) -> Res<Output> {
    let a: Alphabet2D = ctx.load("a", a)?;
    let b: Alphabet2D = ctx.load("b", b)?;
    ctx.caps().check_grid(a.m().checked_pow(2 * k).unwrap_or(usize::MAX))?;
    let v = match v {
        Some(v) => v,
        None => match lines::orthogonal_pair_condition(&a, &b)? {
            PairVerdict::Obstructed { v, .. } => (v.a(), v.b()),
            PairVerdict::FupHolds => {
                return Err(usage("no orthogonal pair of lines, so there is no witness; pass --v to force one").into())
            }
        },
    };
    let f = dft::sharpness_witness(&a, &b, k, v)?;
    let (x, y) = (iterate(&a, k)?, iterate(&b, k)?);
    let support_ok = f.support().is_subset(x.points());
    let fourier_support_ok = dft::dft(&f).support().is_subset(y.points());
    let norm = dft::fup_norm(x.points(), y.points())?;
    let result = json!({
        "k": k,
        "N": x.n(),
        "v": [v.0, v.1],
        "support_ok": support_ok,
        "fourier_support_ok": fourier_support_ok,
        "l2_norm": f.l2_norm(),
        "norm": norm,
        "witness": f,
    });
    if !(support_ok && fourier_support_ok) || (norm - 1.0).abs() > 1e-9 {
        return Err(ctx.violation("witness fails its support or norm checks".into(), result).into());
    }
    json_only(result)
}

fn check_localization(f: &GridFunction, loc: &Localization) -> Res<Vec<String>> {
    let mut failures = Vec::new();
    let supp = f.support();
    if loc.g.is_zero() {
        failures.push("g vanishes".to_string());
    }
    if !loc.g.support().iter().all(|p| supp.contains(p) && loc.line.contains(p)) {
        failures.push("supp g leaves supp f ∩ ℓ".to_string());
    }
    // S + [0, R)² is the whole grid once R ≥ N.
    let near = if loc.radius >= f.n() {
        GridSet::full(f.n())
    } else {
        upper_right_neighborhood(&dft::dft(f).support(), loc.radius)?
    };
    if !dft::dft(&loc.g).support().is_subset(&near) {
        failures.push("supp ĝ leaves the neighbourhood of supp f̂".to_string());
    }
    if loc.line.size() > polymethod::lemma_radius(supp.len()) as i64 {
        failures.push(format!("‖ℓ‖ = {} exceeds the radius bound", loc.line.size()));
    }
    Ok(failures)
}

fn random_set(rng: &mut ChaCha8Rng, battery: &BatteryArgs) -> GridSet {
    let n = rng.random_range(battery.n_min..=battery.n_max);
    let size = rng.random_range(1..=battery.max_support.min(n * n));
    let picks = index::sample(rng, n * n, size);
    GridSet::new(n, picks.into_iter().map(|i| (i / n, i % n))).expect("indices are on the grid")
}

fn line_triple(l: &Line) -> [i64; 3] {
    [l.a(), l.b(), l.c() as i64]
}

fn localize_battery(ctx: &mut Ctx, battery: &BatteryArgs) -> Res<Output> {
    #[derive(Serialize)]
    struct Row {
        trial: usize,
        n: usize,
        support: usize,
        a: i64,
        b: i64,
        c: i64,
        line_size: i64,
        radius: usize,
        g_support: usize,
    }
    ctx.caps().check_grid(battery.n_max * battery.n_max)?;
    let seed = ctx.config.seed.expect("validated");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for trial in 0..battery.trials {
        let s = random_set(&mut rng, battery);
        let n = s.n();
        let mut f = GridFunction::zeros(n, Dim::Two);
        for &(x, y) in s.points() {
            f.values_mut()[x * n + y] = Complex64::from_polar(rng.random_range(0.5..1.5), rng.random_range(0.0..TAU));
        }
        let fail =
            |ctx: &Ctx, m: String| ctx.violation(format!("trial {trial}: {m}"), json!({ "trial": trial, "f": f }));
        let loc = match polymethod::localize_to_line(&f) {
            Ok(loc) => loc,
            Err(e @ FupError::ResourceCap { .. }) => return Err(e.into()),
            Err(e) => return Err(fail(ctx, e.to_string()).into()),
        };
        let failures = check_localization(&f, &loc)?;
        if !failures.is_empty() {
            return Err(fail(ctx, failures.join("; ")).into());
        }
        let [a, b, c] = line_triple(&loc.line);
        rows.push(Row {
            trial,
            n,
            support: s.len(),
            a,
            b,
            c,
            line_size: loc.line.size(),
            radius: loc.radius,
            g_support: loc.g.support().len(),
        });
    }
    let result = json!({ "trials": rows.len(), "passed": rows.len(), "rows": to_value(&rows) });
    Ok(Output { result, csv: Some(csv_rows(&rows)) })
}

/// Survivors of `S ∖ Z_N(F*)`, which must be nonempty and lie on the line.
fn check_separation(s: &GridSet, poly: &BivarPoly, line: &Line, radius: usize) -> Result<GridSet, String> {
    let survivors = s.difference(&polymethod::zeros_among(poly, s));
    if survivors.is_empty() {
        return Err("the polynomial vanishes on all of S".into());
    }
    if !survivors.iter().all(|p| line.contains(p)) {
        return Err("survivors leave the line".into());
    }
    if line.size() > radius as i64 {
        return Err(format!("‖ℓ‖ = {} exceeds R = {radius}", line.size()));
    }
    Ok(survivors)
}

fn separate_battery(ctx: &mut Ctx, battery: &BatteryArgs) -> Res<Output> {
    #[derive(Serialize)]
    struct Row {
        trial: usize,
        n: usize,
        size: usize,
        degree: u32,
        a: i64,
        b: i64,
        c: i64,
        survivors: usize,
    }
    ctx.caps().check_grid(battery.n_max * battery.n_max)?;
    let seed = ctx.config.seed.expect("validated");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for trial in 0..battery.trials {
        let s = random_set(&mut rng, battery);
        let fail =
            |ctx: &Ctx, m: String| ctx.violation(format!("trial {trial}: {m}"), json!({ "trial": trial, "set": s }));
        let sep = match polymethod::separating_poly(&s) {
            Ok(sep) => sep,
            Err(e @ FupError::ResourceCap { .. }) => return Err(e.into()),
            Err(e) => return Err(fail(ctx, e.to_string()).into()),
        };
        let survivors = check_separation(&s, &sep.poly, &sep.line, sep.radius).map_err(|m| fail(ctx, m))?;
        let [a, b, c] = line_triple(&sep.line);
        rows.push(Row {
            trial,
            n: s.n(),
            size: s.len(),
            degree: sep.poly.degree(),
            a,
            b,
            c,
            survivors: survivors.len(),
        });
    }
    let result = json!({ "trials": rows.len(), "passed": rows.len(), "rows": to_value(&rows) });
    Ok(Output { result, csv: Some(csv_rows(&rows)) })
}

#[derive(Serialize)]
struct CountRow {
    #[serde(rename = "N")]
    n: usize,
    count: usize,
}

fn cyclo_count(f: &BivarPoly, nmin: usize, nmax: usize) -> Res<Output> {
    let mut rows = Vec::new();
    for n in nmin..=nmax {
        rows.push(CountRow { n, count: polymethod::eval_zero_set(f, n)?.count });
    }
    let max = rows.iter().rev().max_by_key(|r| r.count).expect("nonempty range");
    let result = json!({
        "expression": render(f),
        "poly": f,
        "degenerate": f.is_zero(),
        "max_count": max.count,
        "max_at": max.n,
        "rows": to_value(&rows),
    });
    Ok(Output { result, csv: Some(csv_rows(&rows)) })
}

fn seven_cover(ctx: &Ctx, f: &BivarPoly, nmin: usize, nmax: usize) -> Res<Output> {
    #[derive(Serialize)]
    struct Row {
        #[serde(rename = "N")]
        n: usize,
        zeros: usize,
        covered: usize,
    }
    let polys = polymethod::seven_polynomials(f)?;
    let mut rows = Vec::new();
    for n in nmin..=nmax {
        let zeros = polymethod::eval_zero_set(f, n)?.zeros;
        let mut covered = GridSet::empty(n);
        for g in &polys {
            let hit = polymethod::zeros_among(g, &zeros);
            covered = GridSet::new(n, covered.iter().chain(hit.iter()).collect::<std::collections::BTreeSet<_>>())?;
        }
        let missed = zeros.difference(&covered);
        if !missed.is_empty() {
            let detail = json!({ "N": n, "uncovered": missed });
            return Err(ctx
                .violation(format!("{} zero(s) of F at N = {n} are not covered", missed.len()), detail)
                .into());
        }
        rows.push(Row { n, zeros: zeros.len(), covered: covered.len() });
    }
    let result = json!({
        "expression": render(f),
        "polynomials": polys.iter().map(render).collect::<Vec<_>>(),
        "rows": to_value(&rows),
    });
    Ok(Output { result, csv: Some(csv_rows(&rows)) })
}

fn check_contraction(ctx: &Ctx, b: &BakerOperator, norm: f64) -> Res<()> {
    if norm > 1.0 + CONTRACTION_TOL {
        let detail = json!({ "k": b.k, "N": b.n, "norm": norm });
        return Err(ctx.violation(format!("‖B_N‖ = {norm} exceeds 1"), detail).into());
    }
    Ok(())
}

fn baker_spectrum(ctx: &Ctx, alphabet: &BakerAlphabet, kmin: u32, kmax: u32, cutoff: &CutoffProfile) -> Res<Output> {
    #[derive(Serialize)]
    struct Row {
        k: u32,
        #[serde(rename = "N")]
        n: usize,
        radius: f64,
        re: f64,
        im: f64,
    }
    let table = baker::spectral_gap_experiment(alphabet, kmin..=kmax, cutoff, ctx.caps())?;
    let mut csv = Vec::new();
    let mut spectra = Vec::new();
    for row in &table.rows {
        let b = baker::build_baker(alphabet, row.k, cutoff, ctx.caps())?;
        check_contraction(ctx, &b, row.norm)?;
        let eig = b.spectrum();
        csv.extend(eig.iter().map(|l| Row { k: row.k, n: row.n, radius: row.radius, re: l.re, im: l.im }));
        spectra.push(json!({ "k": row.k, "eigenvalues": eig.iter().map(|l| [l.re, l.im]).collect::<Vec<_>>() }));
    }
    let result = json!({ "cutoff": cutoff, "smooth": cutoff.is_smooth(), "table": table, "spectra": spectra });
    Ok(Output { result, csv: Some(csv_rows(csv)) })
}

fn region(spans: &[Span]) -> Res<BumpRegion> {
    Ok(BumpRegion::new(spans.iter().map(|s| [s.0, s.1]).collect())?)
}

fn propagation(
    ctx: &Ctx,
    alphabet: &BakerAlphabet,
    phi: &[Span],
    psi: &[Span],
    kmin: u32,
    kmax: u32,
    cutoff: &CutoffProfile,
) -> Res<Output> {
    #[derive(Serialize)]
    struct Row {
        k: u32,
        #[serde(rename = "N")]
        n: usize,
        norm: f64,
    }
    let (phi, psi) = (region(phi)?, region(psi)?);
    let mut rows = Vec::new();
    let mut report = None;
    for k in kmin..=kmax {
        let b = baker::build_baker(alphabet, k, cutoff, ctx.caps())?;
        let r = baker::propagation_check(&phi, &psi, &b)?;
        rows.push(Row { k, n: b.n, norm: r.norm });
        report = Some(r);
    }
    let report = report.expect("nonempty range");
    let exponent = (rows.len() > 1).then(|| {
        let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
        let norms: Vec<f64> = rows.iter().map(|r| r.norm).collect();
        -baker::loglog_slope(&ns, &norms)
    });
    let result = json!({
        "phi": phi,
        "psi": psi,
        "cutoff": cutoff,
        "smooth": cutoff.is_smooth(),
        "separation": report.separation,
        "hypothesis_met": report.hypothesis_met,
        "decay_exponent": exponent,
        "rows": to_value(&rows),
    });
    Ok(Output { result, csv: Some(csv_rows(&rows)) })
}
