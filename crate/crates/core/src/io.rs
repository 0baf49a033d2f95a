//! File formats: datasets and simulation specs as JSON, panels as CSV, and
//! JSON reports. Probabilities are always written as exact `"num/den"`
//! strings. Periods, budgets and patches are 1-based in files.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::axioms::{AxiomReport, Marginal, MarginalDemand};
use crate::demand::DynamicStochasticDemand;
use crate::error::{DrumError, Result};
use crate::feasibility::{Status, Verdict};
use crate::geometry::{build_patches, Budget, PatchSet};
use crate::panel::{Panel, PanelRow};
use crate::rational::{self, Rational};
use crate::rationality::{BudgetPath, ChoiceDomain, ChoicePath, ProfileMatrix};
use crate::simulation::UtilityProcess;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetRecord {
    pub period: usize,
    pub index: usize,
    #[serde(with = "rational::serde_vec")]
    pub prices: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    pub expenditure: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandRecord {
    pub budgets: Vec<usize>,
    pub patches: Vec<usize>,
    #[serde(with = "rational::serde_str")]
    pub probability: Rational,
}

/// Serialized dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetFile {
    pub goods: usize,
    #[serde(default)]
    pub continuous_demand: bool,
    pub budgets: Vec<BudgetRecord>,
    /// Observed budget paths; all combinations when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_paths: Option<Vec<Vec<usize>>>,
    /// Demand entries; may be empty when only the geometry is needed.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub demand: Vec<DemandRecord>,
}

/// Serialized simulation specification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpecFile {
    pub goods: usize,
    #[serde(default)]
    pub continuous_demand: bool,
    pub budgets: Vec<BudgetRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_paths: Option<Vec<Vec<usize>>>,
    pub process: UtilityProcess,
}

/// A validated dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub domain: ChoiceDomain,
    pub rho: DynamicStochasticDemand,
}

impl Dataset {
    /// Datasets may list budgets only.
    pub fn has_demand(&self) -> bool {
        self.rho.entries().next().is_some()
    }

    /// Switches the demand mode and revalidates the demand.
    pub fn with_continuous_demand(mut self, continuous: bool) -> Result<Dataset> {
        self.domain.continuous_demand = continuous;
        if self.has_demand() {
            self.rho.validate(&self.domain)?;
        }
        Ok(self)
    }
}

fn field_error(field: &str, reason: impl std::fmt::Display) -> DrumError {
    DrumError::Input(format!("{field}: {reason}"))
}

fn json_error(e: serde_json::Error) -> DrumError {
    DrumError::Input(format!("line {}, column {}: {e}", e.line(), e.column()))
}

fn one_based(field: &str, v: usize) -> Result<usize> {
    v.checked_sub(1)
        .ok_or_else(|| field_error(field, "indices are 1-based"))
}

/// Builds the per-period patch sets from budget records.
pub fn build_periods(goods: usize, records: &[BudgetRecord]) -> Result<Vec<PatchSet>> {
    if records.is_empty() {
        return Err(field_error("budgets", "at least one budget is required"));
    }
    let mut by_period: BTreeMap<usize, Vec<Budget>> = BTreeMap::new();
    for (n, r) in records.iter().enumerate() {
        let field = format!("budgets[{n}]");
        let period = one_based(&format!("{field}.period"), r.period)?;
        let index = one_based(&format!("{field}.index"), r.index)?;
        if r.prices.len() != goods {
            return Err(field_error(
                &format!("{field}.prices"),
                format!("{} prices for {goods} goods", r.prices.len()),
            ));
        }
        let b = Budget::new(period, index, r.prices.clone(), r.expenditure.clone())
            .map_err(|e| field_error(&field, e))?;
        by_period.entry(period).or_default().push(b);
    }
    let horizon = by_period.len();
    if by_period.keys().copied().ne(0..horizon) {
        return Err(field_error(
            "budgets",
            "periods must be numbered 1..T without gaps",
        ));
    }
    by_period
        .into_values()
        .map(|budgets| build_patches(&budgets).map_err(|e| field_error("budgets", e)))
        .collect()
}

fn build_paths(periods: &[PatchSet], paths: Option<&Vec<Vec<usize>>>) -> Result<Vec<BudgetPath>> {
    let Some(paths) = paths else {
        return Ok(ChoiceDomain::all_budget_paths(periods));
    };
    paths
        .iter()
        .enumerate()
        .map(|(n, p)| {
            let field = format!("budget_paths[{n}]");
            if p.len() != periods.len() {
                return Err(field_error(
                    &field,
                    format!("{} entries for {} periods", p.len(), periods.len()),
                ));
            }
            p.iter()
                .enumerate()
                .map(|(t, &j)| {
                    let j = one_based(&format!("{field}[{t}]"), j)?;
                    if j >= periods[t].budgets.len() {
                        return Err(field_error(
                            &format!("{field}[{t}]"),
                            format!("period {} has {} budgets", t + 1, periods[t].budgets.len()),
                        ));
                    }
                    Ok(j)
                })
                .collect::<Result<Vec<usize>>>()
                .map(BudgetPath)
        })
        .collect()
}

fn build_domain(
    goods: usize,
    budgets: &[BudgetRecord],
    paths: Option<&Vec<Vec<usize>>>,
    continuous: bool,
) -> Result<ChoiceDomain> {
    let periods = build_periods(goods, budgets)?;
    let paths = build_paths(&periods, paths)?;
    let mut unique = paths.clone();
    unique.sort();
    unique.dedup();
    if unique.len() != paths.len() {
        return Err(field_error("budget_paths", "repeated budget path"));
    }
    ChoiceDomain::new(periods, paths, continuous)
}

impl DatasetFile {
    pub fn into_dataset(self) -> Result<Dataset> {
        let domain = build_domain(
            self.goods,
            &self.budgets,
            self.budget_paths.as_ref(),
            self.continuous_demand,
        )?;
        let mut rho = DynamicStochasticDemand::new();
        let mut seen = BTreeSet::new();
        for (n, r) in self.demand.iter().enumerate() {
            let field = format!("demand[{n}]");
            if r.budgets.len() != domain.horizon() || r.patches.len() != domain.horizon() {
                return Err(field_error(
                    &field,
                    format!("expected {} periods", domain.horizon()),
                ));
            }
            let budgets = r
                .budgets
                .iter()
                .map(|&j| one_based(&format!("{field}.budgets"), j))
                .collect::<Result<Vec<_>>>()?;
            let patches = r
                .patches
                .iter()
                .map(|&i| one_based(&format!("{field}.patches"), i))
                .collect::<Result<Vec<_>>>()?;
            let cp = ChoicePath::new(budgets, patches);
            if !seen.insert(cp.clone()) {
                return Err(field_error(
                    &field,
                    format!("choice path {cp} listed twice"),
                ));
            }
            if !domain.is_observed(&cp.budgets) {
                return Err(field_error(
                    &field,
                    DrumError::UnknownBudgetPath(cp.budgets.to_string()),
                ));
            }
            for t in 0..domain.horizon() {
                let j = cp.budgets.0[t];
                if !domain.support(t, j).contains(&cp.patches[t]) {
                    return Err(field_error(
                        &format!("{field}.patches[{t}]"),
                        format!(
                            "patch {} is not a choice on budget {}",
                            cp.patches[t] + 1,
                            domain.periods[t].budgets[j].label()
                        ),
                    ));
                }
            }
            rho.set(cp, r.probability.clone());
        }
        if !self.demand.is_empty() {
            rho.validate(&domain)?;
        }
        Ok(Dataset { domain, rho })
    }

    pub fn from_dataset(dataset: &Dataset) -> DatasetFile {
        let domain = &dataset.domain;
        DatasetFile {
            goods: domain.periods[0].goods(),
            continuous_demand: domain.continuous_demand,
            budgets: budget_records(&domain.periods),
            budget_paths: Some(
                domain
                    .budget_paths
                    .iter()
                    .map(|bp| bp.0.iter().map(|j| j + 1).collect())
                    .collect(),
            ),
            demand: dataset
                .rho
                .entries()
                .map(|(cp, p)| DemandRecord {
                    budgets: cp.budgets.0.iter().map(|j| j + 1).collect(),
                    patches: cp.patches.iter().map(|i| i + 1).collect(),
                    probability: p.clone(),
                })
                .collect(),
        }
    }
}

pub fn budget_records(periods: &[PatchSet]) -> Vec<BudgetRecord> {
    periods
        .iter()
        .flat_map(|s| &s.budgets)
        .map(|b| BudgetRecord {
            period: b.period + 1,
            index: b.index + 1,
            prices: b.prices.clone(),
            expenditure: b.expenditure.clone(),
        })
        .collect()
}

pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let file: DatasetFile = serde_json::from_str(text).map_err(json_error)?;
    file.into_dataset()
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| DrumError::Input(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| DrumError::Input(format!("{}: {e}", path.display())))
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    parse_dataset(&read_text(path)?)
        .map_err(|e| DrumError::Input(format!("{}: {e}", path.display())))
}

pub fn dataset_to_json(dataset: &Dataset) -> String {
    let mut text =
        serde_json::to_string_pretty(&DatasetFile::from_dataset(dataset)).expect("serializable");
    text.push('\n');
    text
}

pub fn save_dataset(path: &Path, dataset: &Dataset) -> Result<()> {
    write_text(path, &dataset_to_json(dataset))
}

pub fn parse_simulation_spec(text: &str) -> Result<(ChoiceDomain, UtilityProcess)> {
    let file: SimulationSpecFile = serde_json::from_str(text).map_err(json_error)?;
    let domain = build_domain(
        file.goods,
        &file.budgets,
        file.budget_paths.as_ref(),
        file.continuous_demand,
    )?;
    Ok((domain, file.process))
}

pub fn load_simulation_spec(path: &Path) -> Result<(ChoiceDomain, UtilityProcess)> {
    parse_simulation_spec(&read_text(path)?)
        .map_err(|e| DrumError::Input(format!("{}: {e}", path.display())))
}

/// Reads a panel with header `agent,period,budget[,weight],y1,...,yK`.
/// Agent ids are arbitrary strings; they are numbered in order of first
/// appearance.
pub fn read_panel<R: Read>(reader: R, goods: usize) -> Result<Panel> {
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv
        .headers()
        .map_err(|e| DrumError::Input(format!("panel header: {e}")))?
        .clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let missing = |name: &str| DrumError::Input(format!("panel header: missing column {name:?}"));
    let agent_col = column("agent").ok_or_else(|| missing("agent"))?;
    let period_col = column("period").ok_or_else(|| missing("period"))?;
    let budget_col = column("budget").ok_or_else(|| missing("budget"))?;
    let weight_col = column("weight");
    let good_cols = (1..=goods)
        .map(|k| column(&format!("y{k}")).ok_or_else(|| missing(&format!("y{k}"))))
        .collect::<Result<Vec<_>>>()?;

    let mut ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut panel = Panel::default();
    for (n, record) in csv.records().enumerate() {
        // header is line 1
        let line = n + 2;
        let bad = |reason: String| DrumError::Input(format!("panel line {line}: {reason}"));
        let record = record.map_err(|e| bad(e.to_string()))?;
        let get = |c: usize| record.get(c).unwrap_or("");
        let index = |c: usize, name: &str| -> Result<usize> {
            get(c)
                .parse::<usize>()
                .ok()
                .and_then(|v| v.checked_sub(1))
                .ok_or_else(|| {
                    bad(format!(
                        "{name} must be a positive integer, got {:?}",
                        get(c)
                    ))
                })
        };
        let next = ids.len();
        let agent = *ids.entry(get(agent_col).to_string()).or_insert(next);
        let period = index(period_col, "period")?;
        let budget = index(budget_col, "budget")?;
        let point = good_cols
            .iter()
            .map(|&c| rational::parse(get(c)).map_err(|e| bad(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        if let Some(c) = weight_col {
            if !get(c).is_empty() {
                let w = rational::parse(get(c)).map_err(|e| bad(e.to_string()))?;
                if num_traits::Signed::is_negative(&w) {
                    return Err(bad("negative weight".into()));
                }
                if let Some(prev) = panel.weights.insert(agent, w.clone()) {
                    if prev != w {
                        return Err(bad(format!(
                            "agent {:?} has conflicting weights",
                            get(agent_col)
                        )));
                    }
                }
            }
        }
        panel.rows.push(PanelRow {
            agent,
            period,
            budget,
            point,
        });
    }
    if panel.is_empty() {
        return Err(DrumError::EmptyPanel);
    }
    Ok(panel)
}

pub fn load_panel(path: &Path, goods: usize) -> Result<Panel> {
    let file = std::fs::File::open(path)
        .map_err(|e| DrumError::Input(format!("{}: {e}", path.display())))?;
    read_panel(file, goods).map_err(|e| DrumError::Input(format!("{}: {e}", path.display())))
}

pub fn write_panel<W: Write>(writer: W, panel: &Panel) -> Result<()> {
    let goods = panel.rows.first().map_or(0, |r| r.point.len());
    let mut csv = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| DrumError::Input(e.to_string());
    let mut header = vec![
        "agent".to_string(),
        "period".into(),
        "budget".into(),
        "weight".into(),
    ];
    header.extend((1..=goods).map(|k| format!("y{k}")));
    csv.write_record(&header).map_err(io)?;
    for row in &panel.rows {
        let mut rec = vec![
            (row.agent + 1).to_string(),
            (row.period + 1).to_string(),
            (row.budget + 1).to_string(),
            panel
                .weights
                .get(&row.agent)
                .map(rational::format)
                .unwrap_or_default(),
        ];
        rec.extend(row.point.iter().map(rational::format));
        csv.write_record(&rec).map_err(io)?;
    }
    csv.flush().map_err(|e| DrumError::Input(e.to_string()))
}

pub fn save_panel(path: &Path, panel: &Panel) -> Result<()> {
    let file = std::fs::File::create(path)
        .map_err(|e| DrumError::Input(format!("{}: {e}", path.display())))?;
    write_panel(file, panel)
}

fn strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(rational::format).collect()
}

/// Patches of every period with their sign vectors and dominance pairs.
pub fn patches_json(periods: &[PatchSet]) -> Value {
    let periods: Vec<Value> = periods
        .iter()
        .map(|set| {
            let patches: Vec<Value> = set
                .all_patches()
                .map(|p| {
                    json!({
                        "label": set.label(p.id()),
                        "budget": set.budgets[p.owner].label(),
                        "intersection": p.is_intersection,
                        "representative": strings(&p.representative),
                        "signs": p.signs.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let dominance: Vec<Value> = set
                .dominance
                .iter()
                .map(|(a, b)| json!([set.label(*a), set.label(*b)]))
                .collect();
            json!({ "period": set.period + 1, "patches": patches, "dominance": dominance })
        })
        .collect();
    json!({ "periods": periods })
}

/// Sparse matrix export: 0-based `[row, column]` pairs of ones with row and
/// column legends.
pub fn matrix_json(matrix: &ProfileMatrix) -> Value {
    let mut entries: Vec<[usize; 2]> = matrix
        .columns
        .iter()
        .enumerate()
        .flat_map(|(c, col)| col.iter().map(move |&r| [r, c]))
        .collect();
    entries.sort_unstable();
    json!({
        "shape": [matrix.row_count(), matrix.column_count()],
        "rows": matrix.row_labels(),
        "columns": matrix.column_labels(),
        "entries": entries,
    })
}

/// Dense 0/1 rows separated by spaces, one line per choice path.
pub fn matrix_text(matrix: &ProfileMatrix) -> String {
    matrix
        .dense()
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            cells.join(" ") + "\n"
        })
        .collect()
}

pub fn verdict_json(matrix: &ProfileMatrix, verdict: &Verdict) -> Value {
    let status = match verdict.status {
        Status::Feasible => "feasible",
        Status::Infeasible => "infeasible",
    };
    let labels = matrix.column_labels();
    let weights = verdict.weights.as_ref().map(|w| {
        w.iter()
            .zip(&labels)
            .filter(|(v, _)| !num_traits::Zero::is_zero(*v))
            .map(|(v, l)| json!({ "profile": l, "weight": rational::format(v) }))
            .collect::<Vec<_>>()
    });
    let certificate = verdict.certificate.as_ref().map(|d| {
        d.iter()
            .zip(matrix.rows())
            .map(|(v, cp)| json!({ "choice_path": cp.to_string(), "value": rational::format(v) }))
            .collect::<Vec<_>>()
    });
    let sequence = verdict.violating_sequence(matrix).map(|seq| {
        seq.iter()
            .map(|(cp, m)| json!({ "choice_path": cp.to_string(), "multiplicity": m.to_string() }))
            .collect::<Vec<_>>()
    });
    json!({
        "status": status,
        "weights": weights,
        "certificate": certificate,
        "violating_sequence": sequence,
        "witness_verified": verdict.witness_verified,
        "certificate_verified": verdict.certificate_verified,
        "rows": verdict.diagnostics.rows,
        "columns": verdict.diagnostics.columns,
        "pivots": verdict.diagnostics.pivots,
    })
}

pub fn axiom_report_json(report: &AxiomReport) -> Value {
    let violations: Vec<Value> = report
        .violations
        .iter()
        .map(|v| {
            json!({
                "description": v.description,
                "lhs": v.lhs.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "rhs": v.rhs.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "relation": v.relation.to_string(),
                "lhs_value": rational::format(&v.lhs_value),
                "rhs_value": rational::format(&v.rhs_value),
            })
        })
        .collect();
    json!({
        "axiom": report.axiom.name(),
        "status": report.status.to_string(),
        "checked": report.checked,
        "violations": violations,
        "notes": report.notes,
    })
}

fn marginal_json(set: &PatchSet, m: &Marginal) -> Value {
    let values: serde_json::Map<String, Value> = m
        .values
        .iter()
        .map(|(id, v)| (set.label(*id), Value::String(rational::format(v))))
        .collect();
    Value::Object(values)
}

pub fn slice_json(domain: &ChoiceDomain, m: &MarginalDemand, verdicts: &[Option<bool>]) -> Value {
    let set = &domain.periods[m.period];
    let families: Vec<Value> = m
        .families
        .iter()
        .zip(verdicts)
        .map(|(f, v)| {
            json!({
                "given": f.label(domain),
                "marginal": marginal_json(set, &f.marginal),
                "rum_feasible": v,
            })
        })
        .collect();
    json!({
        "period": m.period + 1,
        "well_defined": m.well_defined,
        "families": families,
        "unobserved": m.unobserved.iter().map(|id| set.label(*id)).collect::<Vec<_>>(),
    })
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write_text(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use crate::reference;

    fn table5_dataset() -> Dataset {
        Dataset {
            domain: reference::simple_setup_domain(),
            rho: reference::table5(),
        }
    }

    #[test]
    fn dataset_round_trip() {
        let d = table5_dataset();
        let text = dataset_to_json(&d);
        assert!(text.contains("\"1/4\""));
        assert_eq!(parse_dataset(&text).unwrap(), d);
    }

    #[test]
    fn unnormalized_block_is_named() {
        let mut file = DatasetFile::from_dataset(&table5_dataset());
        let r = file
            .demand
            .iter_mut()
            .find(|r| r.budgets == vec![2, 1] && !num_traits::Zero::is_zero(&r.probability))
            .unwrap();
        r.probability -= frac(1, 10);
        let text = serde_json::to_string(&file).unwrap();
        match parse_dataset(&text) {
            Err(DrumError::NotNormalized { path, sum }) => {
                assert_eq!(path, "[2,1]");
                assert_eq!(sum, "9/10");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn diagnostics_name_lines_and_fields() {
        let err = parse_dataset("{\n  \"goods\": 2,\n  \"budgets\": 7\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        let text = r#"{"goods": 2, "budgets": [{"period": 1, "index": 1, "prices": ["1", "0"], "expenditure": "1"}]}"#;
        assert!(parse_dataset(text)
            .unwrap_err()
            .to_string()
            .starts_with("budgets[0]"));
        let text = r#"{"goods": 2, "budgets": [{"period": 1, "index": 1, "prices": ["1", "1"], "expenditure": "1"}],
            "demand": [{"budgets": [1], "patches": [3], "probability": "1"}]}"#;
        assert!(parse_dataset(text)
            .unwrap_err()
            .to_string()
            .starts_with("demand[0].patches[0]"));
    }

    #[test]
    fn panel_csv_round_trip() {
        let text = "agent,period,budget,weight,y1,y2\na,1,1,2,12/5,1\na,2,1,2,1,12/5\nb,1,1,,0,5\n";
        let panel = read_panel(text.as_bytes(), 2).unwrap();
        assert_eq!(panel.rows.len(), 3);
        assert_eq!(panel.weight(0), frac(2, 1));
        assert_eq!(panel.weight(1), frac(1, 1));
        let mut out = Vec::new();
        write_panel(&mut out, &panel).unwrap();
        let again = read_panel(out.as_slice(), 2).unwrap();
        assert_eq!(again, panel);
        let err = read_panel("agent,period,budget,y1,y2\na,0,1,1,1\n".as_bytes(), 2).unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }
}
