use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use moonshine::chartab::{
    adams_tower_trace, decompose_series, nonnegativity_audit, CharacterTable, ModuleDecomposition, DATA_DIR_ENV,
};
use moonshine::distrib::{proportion_table, ProportionTable};
use moonshine::modgroup::{load_monster_symbols, parse_monster_groups, GroupSymbol};
use moonshine::qseries::{faber_tower, j_series, ZSeries};
use moonshine::rademacher::{rounded_class_traces, rounded_tg_series, tg_partial_sums, PrecisionConfig};
use num_bigint::BigInt;

use crate::report::Report;
use crate::CliError;

/// Everything a command may read; each command validates what it needs.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub class: Option<String>,
    pub m: i64,
    pub n: Vec<i64>,
    pub n_max: Option<i64>,
    pub cmax: Vec<u64>,
    pub bits: Option<usize>,
    pub chartab: Option<PathBuf>,
    pub chars: Vec<usize>,
    pub digits: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { class: None, m: 1, n: Vec::new(), n_max: None, cmax: Vec::new(), bits: None, chartab: None, chars: Vec::new(), digits: 4 }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

impl RunConfig {
    fn precision(&self) -> Result<PrecisionConfig, CliError> {
        let d = PrecisionConfig::default();
        let c_max = match self.cmax.as_slice() {
            [] => d.c_max,
            [c] => *c,
            _ => return Err(invalid("--cmax takes a single value for this command")),
        };
        Ok(PrecisionConfig::new(self.bits.unwrap_or(d.working_bits), c_max)?)
    }

    fn n_max(&self) -> Result<i64, CliError> {
        let n = self.n_max.or_else(|| self.n.iter().copied().max()).ok_or_else(|| invalid("--n-max is required"))?;
        if n < 0 {
            return Err(invalid("--n-max must be nonnegative"));
        }
        Ok(n)
    }

    fn m(&self) -> Result<i64, CliError> {
        if self.m < 1 {
            return Err(invalid("--m must be at least 1"));
        }
        Ok(self.m)
    }

    fn symbol(&self) -> Result<GroupSymbol, CliError> {
        let class = self.class.as_deref().ok_or_else(|| invalid("--class is required"))?;
        load_symbols()?.remove(class).ok_or_else(|| invalid(format!("unknown class {class:?}")))
    }

    fn table(&self) -> Result<CharacterTable, CliError> {
        Ok(match &self.chartab {
            Some(p) => CharacterTable::load(p)?,
            None => CharacterTable::bundled()?,
        })
    }
}

/// Class → symbol, from `$MOONSHINE_DATA_DIR/monster_groups` when set.
pub fn load_symbols() -> Result<BTreeMap<String, GroupSymbol>, CliError> {
    let parsed = match std::env::var_os(DATA_DIR_ENV) {
        Some(dir) => {
            let path = Path::new(&dir).join("monster_groups");
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            parse_monster_groups(&text)
        }
        None => load_monster_symbols(),
    };
    parsed.map_err(|e| CliError::Data(e.to_string()))
}

pub fn jcoeffs(cfg: &RunConfig) -> Result<Report, CliError> {
    let n_max = cfg.n_max()?;
    let j = j_series(n_max as usize + 2);
    let mut r = Report::new("jcoeffs", vec!["n".into(), "c(n)".into()]);
    r.rows = j.terms().map(|(n, c)| vec![n.to_string(), c.to_string()]).collect();
    Ok(r)
}

/// Partial sums to each threshold, one row per threshold, then the rounded
/// exact values.
pub fn convergence(cfg: &RunConfig) -> Result<Report, CliError> {
    let sym = cfg.symbol()?;
    let ns = if cfg.n.is_empty() { vec![1, 5, 10] } else { cfg.n.clone() };
    if ns.iter().any(|&n| n < 1) {
        return Err(invalid("--n entries must be positive"));
    }
    let thresholds = if cfg.cmax.is_empty() { vec![25, 50, 75, 100] } else { cfg.cmax.clone() };
    let top = *thresholds.iter().max().expect("nonempty");
    let bits = cfg.bits.unwrap_or(PrecisionConfig::default().working_bits);
    let pc = PrecisionConfig::new(bits, top.max(PrecisionConfig::default().c_max))?;
    let sums = tg_partial_sums(&sym, 1, &ns, &thresholds, &pc)?;
    let mut header = vec!["c".to_string()];
    header.extend(ns.iter().map(|n| format!("n={n}")));
    let mut r = Report::new("convergence", header);
    for (t, row) in thresholds.iter().zip(&sums) {
        let mut cells = vec![format!("<={t}")];
        cells.extend(row.iter().map(|e| e.value.re.to_fixed(3)));
        r.rows.push(cells);
    }
    let prec = *ns.iter().max().expect("nonempty") as usize + 2;
    let (exact, cert) = rounded_tg_series(&sym, prec, &pc)?;
    let mut cells = vec!["exact".to_string()];
    cells.extend(ns.iter().map(|&n| exact.coeff(n).expect("in range").to_string()));
    r.rows.push(cells);
    r.notes.push(format!("class {} ({}), rounding at c_max = {}, worst distance {:.3e}", cfg.class.as_deref().unwrap_or(""), sym.text(), pc.c_max, cert.worst_distance()));
    Ok(r)
}

pub fn tower(cfg: &RunConfig) -> Result<Report, CliError> {
    let sym = cfg.symbol()?;
    let m = cfg.m()?;
    let n_max = cfg.n_max()?;
    let pc = cfg.precision()?;
    let (t, cert) = rounded_tg_series(&sym, (n_max + m + 1) as usize, &pc)?;
    let f = faber_tower(&t, m as u32).map_err(|e| invalid(e.to_string()))?;
    let mut r = Report::new("tower", vec!["n".into(), "coefficient".into()]);
    r.rows = f.series.truncate(n_max + 1).terms().map(|(n, c)| vec![n.to_string(), c.to_string()]).collect();
    let poly: Vec<String> = f.poly.iter().map(BigInt::to_string).collect();
    r.notes.push(format!("Faber polynomial coefficients, constant term first: [{}]", poly.join(", ")));
    r.notes.push(format!("T_g rounded at c_max = {}, worst distance {:.3e}", pc.c_max, cert.worst_distance()));
    r.data = serde_json::json!({ "faber_polynomial": poly });
    Ok(r)
}

/// Traces of every class on the degree −m..=n_max pieces of the m-th tower,
/// through the Adams operations on the rounded T_g.
pub fn tower_traces(
    table: &CharacterTable,
    symbols: &BTreeMap<String, GroupSymbol>,
    m: i64,
    n_max: i64,
    pc: &PrecisionConfig,
) -> Result<BTreeMap<String, ZSeries>, CliError> {
    let (base, _) = rounded_class_traces(symbols, 1, (m * n_max.max(1) + 2) as usize, pc)
        .map_err(|(sym, e)| CliError::from(e).with_context(&format!("symbol {sym}")))?;
    if m == 1 {
        return Ok(base);
    }
    let mut out = BTreeMap::new();
    for class in &table.classes {
        let coeffs = (-m..=n_max)
            .map(|n| adams_tower_trace(table, &class.name, m as u64, n, &base))
            .collect::<Result<Vec<_>, _>>()?;
        out.insert(class.name.clone(), ZSeries::new(-m, coeffs));
    }
    Ok(out)
}

impl CliError {
    fn with_context(self, ctx: &str) -> Self {
        match self {
            CliError::Validation(s) => CliError::Validation(format!("{ctx}: {s}")),
            CliError::Certificate(s) => CliError::Certificate(format!("{ctx}: {s}")),
            CliError::Data(s) => CliError::Data(format!("{ctx}: {s}")),
        }
    }
}

/// Exact decompositions of the degree −m..=n_max pieces of the m-th tower.
pub fn decompositions(cfg: &RunConfig, table: &CharacterTable) -> Result<Vec<ModuleDecomposition>, CliError> {
    let m = cfg.m()?;
    let n_max = cfg.n_max()?;
    let pc = cfg.precision()?;
    let traces = tower_traces(table, &load_symbols()?, m, n_max, &pc)?;
    Ok(decompose_series(table, m, &traces, n_max)?)
}

pub fn multiplicities(cfg: &RunConfig) -> Result<Report, CliError> {
    let table = cfg.table()?;
    let chars: Vec<usize> = if cfg.chars.is_empty() { table.row_indices().collect() } else { cfg.chars.clone() };
    if let Some(i) = chars.iter().find(|i| table.row(**i).is_none()) {
        return Err(invalid(format!("χ{i} is not in the character table")));
    }
    let ds = decompositions(cfg, &table)?;
    let mut header = vec!["n".to_string(), "dimension".to_string()];
    header.extend(chars.iter().map(|i| format!("m_{i}")));
    let mut r = Report::new("multiplicities", header);
    for d in &ds {
        let mut row = vec![d.n.to_string(), d.dimension.to_string()];
        row.extend(chars.iter().map(|i| d.multiplicities[i].to_string()));
        r.rows.push(row);
    }
    let audit = nonnegativity_audit(&table, &ds);
    r.notes.push(format!(
        "audit: {} pieces checked, {} violations{}",
        audit.checked,
        audit.violations.len(),
        if table.is_complete() { "" } else { " (partial table: dimension identity checked as an upper bound)" }
    ));
    r.notes.extend(audit.violations.iter().cloned());
    r.data = serde_json::json!({ "audit_passed": audit.passed(), "violations": audit.violations });
    if !audit.passed() {
        return Err(CliError::Certificate(r.notes.join("; ")));
    }
    Ok(r)
}

pub fn distribution_table(cfg: &RunConfig) -> Result<ProportionTable, CliError> {
    let table = cfg.table()?;
    if !table.is_complete() {
        return Err(CliError::Data("proportions need all 194 irreducibles; pass a complete table with --chartab".into()));
    }
    let ds = decompositions(cfg, &table)?;
    let ds: Vec<ModuleDecomposition> = if cfg.n.is_empty() { ds } else { ds.into_iter().filter(|d| cfg.n.contains(&d.n)).collect() };
    let chars: Vec<usize> = if cfg.chars.is_empty() { vec![1, 2, 194] } else { cfg.chars.clone() };
    Ok(proportion_table(&table, cfg.m, &ds, &chars)?)
}

pub fn distribution(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = distribution_table(cfg)?;
    let mut r = Report::new("distribution", p.header());
    r.rows = p.cells(cfg.digits);
    r.data = serde_json::to_value(&p).expect("serializable");
    Ok(r)
}
