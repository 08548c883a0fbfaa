//! Finite structural causal models: colliders, conditioning, locking, and
//! two counterfactual semantics.
//!
//! A model is a list of variables in construction order, each with a finite
//! noise distribution and a deterministic structural function of its parents
//! and its own noise. Parents must already exist when a variable is added,
//! so the graph is acyclic by construction. All noise domains are finite and
//! enumerable: conditional sampling works by full enumeration of the noise
//! joint, which keeps every conditional exact and removes any need for
//! rejection or MCMC.
//!
//! Two counterfactual readings are implemented:
//!
//! * [`Scm::counterfactual_fixed_noise`] holds every noise term fixed,
//!   applies the intervention, and re-evaluates descendants — the reading
//!   under which selection-induced correlations are fragile.
//! * [`Scm::counterfactual_constrained`] resamples noises conditioned on the
//!   intervention *and* a locked collider value; the counterfactual is a
//!   distribution, and locked-collider correlations become robust.

mod models;

pub use models::{build_death_in_damascus, build_ivy, build_penrose_paths, build_toy_bell, PenroseRegime};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rng::{run_partitioned, RandomStream};

/// Structural function: `(parent values, own noise value) -> value`.
pub type StructuralFn = Arc<dyn Fn(&[usize], usize) -> usize + Send + Sync>;

/// One endogenous variable (exogenous choices are variables whose function
/// ignores parents and copies the noise).
#[derive(Clone)]
pub struct Variable {
    name: String,
    cardinality: usize,
    labels: Option<Vec<String>>,
    noise: Vec<f64>,
    parents: Vec<usize>,
    function: StructuralFn,
}

impl std::fmt::Debug for Variable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Variable")
            .field("name", &self.name)
            .field("cardinality", &self.cardinality)
            .field("parents", &self.parents)
            .field("noise_domain", &self.noise.len())
            .finish()
    }
}

impl Variable {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    /// True when the variable has no parents: a setting or exogenous choice,
    /// the only legal targets of interventions.
    pub fn is_choice(&self) -> bool {
        self.parents.is_empty()
    }
}

/// A lock: the named variable can only take `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Constraint {
    pub variable: usize,
    pub value: usize,
}

/// Finite structural causal model, optionally carrying a locked variable.
#[derive(Debug, Clone)]
pub struct Scm {
    variables: Vec<Variable>,
    constraint: Option<Constraint>,
}

/// Incremental model builder; parents are referenced by name and must
/// already have been added, which keeps the graph acyclic.
#[derive(Default)]
pub struct ScmBuilder {
    variables: Vec<Variable>,
}

impl ScmBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn index_of(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Root variable drawn from `dist`; its value is its noise.
    pub fn choice(self, name: &str, dist: &[f64]) -> Result<Self> {
        self.choice_labeled(name, dist, None)
    }

    pub fn choice_labeled(
        mut self,
        name: &str,
        dist: &[f64],
        labels: Option<&[&str]>,
    ) -> Result<Self> {
        check_distribution(dist)?;
        self.variables.push(Variable {
            name: name.to_string(),
            cardinality: dist.len(),
            labels: labels.map(|ls| ls.iter().map(|s| s.to_string()).collect()),
            noise: dist.to_vec(),
            parents: Vec::new(),
            function: Arc::new(|_, noise| noise),
        });
        Ok(self)
    }

    /// Deterministic variable: a function of parents only.
    pub fn deterministic<F>(
        self,
        name: &str,
        parents: &[&str],
        cardinality: usize,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(&[usize]) -> usize + Send + Sync + 'static,
    {
        self.deterministic_labeled(name, parents, cardinality, None, f)
    }

    pub fn deterministic_labeled<F>(
        self,
        name: &str,
        parents: &[&str],
        cardinality: usize,
        labels: Option<&[&str]>,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(&[usize]) -> usize + Send + Sync + 'static,
    {
        self.stochastic_labeled(name, parents, cardinality, &[1.0], labels, move |pa, _| f(pa))
    }

    /// Variable with its own noise term: `value = f(parents, noise)` where
    /// `noise ~ dist` independently of everything else.
    pub fn stochastic<F>(
        self,
        name: &str,
        parents: &[&str],
        cardinality: usize,
        dist: &[f64],
        f: F,
    ) -> Result<Self>
    where
        F: Fn(&[usize], usize) -> usize + Send + Sync + 'static,
    {
        self.stochastic_labeled(name, parents, cardinality, dist, None, f)
    }

    pub fn stochastic_labeled<F>(
        mut self,
        name: &str,
        parents: &[&str],
        cardinality: usize,
        dist: &[f64],
        labels: Option<&[&str]>,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(&[usize], usize) -> usize + Send + Sync + 'static,
    {
        check_distribution(dist)?;
        let parents: Vec<usize> = parents
            .iter()
            .map(|p| self.index_of(p))
            .collect::<Result<_>>()?;
        self.variables.push(Variable {
            name: name.to_string(),
            cardinality,
            labels: labels.map(|ls| ls.iter().map(|s| s.to_string()).collect()),
            noise: dist.to_vec(),
            parents,
            function: Arc::new(f),
        });
        Ok(self)
    }

    /// Validates totality of every structural function over its parent and
    /// noise domains, then freezes the model.
    pub fn build(self) -> Result<Scm> {
        let scm = Scm {
            variables: self.variables,
            constraint: None,
        };
        for (i, var) in scm.variables.iter().enumerate() {
            let parent_cards: Vec<usize> = var
                .parents
                .iter()
                .map(|&p| scm.variables[p].cardinality)
                .collect();
            for pa in enumerate_product(&parent_cards) {
                for noise in 0..var.noise.len() {
                    let value = (var.function)(&pa, noise);
                    if value >= var.cardinality {
                        return Err(Error::ValueOutOfDomain {
                            variable: scm.variables[i].name.clone(),
                            value,
                        });
                    }
                }
            }
        }
        Ok(scm)
    }
}

fn check_distribution(dist: &[f64]) -> Result<()> {
    let total: f64 = dist.iter().sum();
    if dist.is_empty() || dist.iter().any(|&w| !(0.0..=1.0).contains(&w)) || (total - 1.0).abs() > 1e-9
    {
        return Err(Error::InvalidMixture(total));
    }
    Ok(())
}

/// Odometer over a mixed-radix domain.
fn enumerate_product(cards: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &card in cards {
        let mut next = Vec::with_capacity(out.len() * card);
        for prefix in &out {
            for v in 0..card {
                let mut row = prefix.clone();
                row.push(v);
                next.push(row);
            }
        }
        out = next;
    }
    out
}

/// One complete assignment plus the noise vector that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub values: Vec<usize>,
    pub(crate) noise: Vec<usize>,
}

/// How a dataset was produced.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "kebab-case")]
pub enum Provenance {
    Sampled,
    Conditioned(String),
    Constrained,
}

#[derive(Debug, Clone)]
struct ColumnMeta {
    name: String,
    cardinality: usize,
    labels: Option<Vec<String>>,
}

/// Rows of complete assignments plus a record of how they were selected.
#[derive(Debug, Clone)]
pub struct Dataset {
    columns: Vec<ColumnMeta>,
    rows: Vec<Row>,
    provenance: Provenance,
}

impl Dataset {
    fn from_scm(scm: &Scm, rows: Vec<Row>, provenance: Provenance) -> Self {
        Self {
            columns: scm
                .variables
                .iter()
                .map(|v| ColumnMeta {
                    name: v.name.clone(),
                    cardinality: v.cardinality,
                    labels: v.labels.clone(),
                })
                .collect(),
            rows,
            provenance,
        }
    }

    #[cfg(test)]
    pub(crate) fn synthetic(names: &[&str], cardinalities: &[usize], values: Vec<Vec<usize>>) -> Self {
        Self {
            columns: names
                .iter()
                .zip(cardinalities)
                .map(|(name, &cardinality)| ColumnMeta {
                    name: name.to_string(),
                    cardinality,
                    labels: None,
                })
                .collect(),
            rows: values
                .into_iter()
                .map(|values| Row {
                    values,
                    noise: Vec::new(),
                })
                .collect(),
            provenance: Provenance::Sampled,
        }
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn cardinality(&self, column: usize) -> usize {
        self.columns[column].cardinality
    }

    /// Display label for a value: the column's label when present, the
    /// numeral otherwise.
    pub fn label(&self, column: usize, value: usize) -> String {
        match &self.columns[column].labels {
            Some(labels) => labels[value].clone(),
            None => value.to_string(),
        }
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Rows passing the predicate; errors when nothing survives.
    pub fn condition<F>(&self, predicate: F, description: &str) -> Result<Dataset>
    where
        F: Fn(&Row) -> bool,
    {
        let rows: Vec<Row> = self.rows.iter().filter(|r| predicate(r)).cloned().collect();
        if rows.is_empty() {
            return Err(Error::EmptySelection);
        }
        Ok(Dataset {
            columns: self.columns.clone(),
            rows,
            provenance: Provenance::Conditioned(description.to_string()),
        })
    }

    /// Conditions on `variable = value`.
    pub fn condition_eq(&self, variable: &str, value: usize) -> Result<Dataset> {
        let idx = self.column_index(variable)?;
        self.condition(
            |row| row.values[idx] == value,
            &format!("{variable}={value}"),
        )
    }

    /// Empirical `P(variable = value)`.
    pub fn frequency(&self, variable: &str, value: usize) -> Result<f64> {
        let idx = self.column_index(variable)?;
        if self.rows.is_empty() {
            return Err(Error::EmptySelection);
        }
        let hits = self.rows.iter().filter(|r| r.values[idx] == value).count();
        Ok(hits as f64 / self.rows.len() as f64)
    }
}

/// Cumulative-weight sampler over enumerated noise cells.
struct CellSampler {
    cumulative: Vec<f64>,
}

impl CellSampler {
    fn new(weights: &[f64], total: f64) -> Self {
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for &w in weights {
            acc += w / total;
            cumulative.push(acc);
        }
        Self { cumulative }
    }

    fn draw(&self, u: f64) -> usize {
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1)
    }
}

impl Scm {
    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable_index(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn constraint(&self) -> Option<Constraint> {
        self.constraint
    }

    /// Returns a copy with `variable` locked to `value`.
    ///
    /// Errors when the value has zero prior probability: a lock must pick a
    /// possibility, not create one.
    pub fn lock(&self, variable: &str, value: usize) -> Result<Scm> {
        let idx = self.variable_index(variable)?;
        if value >= self.variables[idx].cardinality {
            return Err(Error::ValueOutOfDomain {
                variable: variable.to_string(),
                value,
            });
        }
        let constraint = Constraint {
            variable: idx,
            value,
        };
        let feasible = self
            .enumerate_cells(None)
            .iter()
            .any(|(row, w)| row.values[idx] == value && *w > 0.0);
        if !feasible {
            return Err(Error::InfeasibleConstraint);
        }
        Ok(Scm {
            variables: self.variables.clone(),
            constraint: Some(constraint),
        })
    }

    /// Returns a copy with any lock removed.
    pub fn unlocked(&self) -> Scm {
        Scm {
            variables: self.variables.clone(),
            constraint: None,
        }
    }

    fn evaluate(&self, noise: &[usize], intervention: Option<(usize, usize)>) -> Vec<usize> {
        let mut values = Vec::with_capacity(self.variables.len());
        for (i, var) in self.variables.iter().enumerate() {
            let value = match intervention {
                Some((target, forced)) if target == i => forced,
                _ => {
                    let parent_values: Vec<usize> =
                        var.parents.iter().map(|&p| values[p]).collect();
                    (var.function)(&parent_values, noise[i])
                }
            };
            values.push(value);
        }
        values
    }

    /// Full enumeration of the noise joint (positive-probability cells only),
    /// evaluated under an optional intervention.
    fn enumerate_cells(&self, intervention: Option<(usize, usize)>) -> Vec<(Row, f64)> {
        let domains: Vec<usize> = self.variables.iter().map(|v| v.noise.len()).collect();
        enumerate_product(&domains)
            .into_iter()
            .filter_map(|noise| {
                let weight: f64 = self
                    .variables
                    .iter()
                    .zip(&noise)
                    .map(|(v, &u)| v.noise[u])
                    .product();
                if weight <= 0.0 {
                    return None;
                }
                let values = self.evaluate(&noise, intervention);
                Some((Row { values, noise }, weight))
            })
            .collect()
    }

    /// The prior support: every positive-probability noise assignment with
    /// its realized row and weight. The basis of all exact conditionals and
    /// of exhaustive counterfactual checks.
    pub fn support(&self) -> Vec<(Row, f64)> {
        self.enumerate_cells(None)
    }

    fn draw_row(&self, rng: &mut crate::rng::TrialRng) -> Row {
        let mut noise = Vec::with_capacity(self.variables.len());
        for var in &self.variables {
            noise.push(rng.choose_weighted(&var.noise));
        }
        let values = self.evaluate(&noise, None);
        Row { values, noise }
    }

    /// `n` independent draws; requires an unconstrained model.
    pub fn sample(&self, n: u64, stream: &RandomStream, partitions: u32) -> Result<Dataset> {
        if self.constraint.is_some() {
            return Err(Error::ConstraintPresent);
        }
        if n == 0 {
            return Err(Error::NoTrials);
        }
        let rows = run_partitioned(stream, n, partitions, |rng| self.draw_row(rng));
        Ok(Dataset::from_scm(self, rows, Provenance::Sampled))
    }

    fn sample_cells(
        &self,
        cells: Vec<(Row, f64)>,
        n: u64,
        stream: &RandomStream,
        partitions: u32,
    ) -> Result<Vec<Row>> {
        let total: f64 = cells.iter().map(|(_, w)| w).sum();
        if cells.is_empty() || total <= 0.0 {
            return Err(Error::InfeasibleConstraint);
        }
        let weights: Vec<f64> = cells.iter().map(|(_, w)| *w).collect();
        let sampler = CellSampler::new(&weights, total);
        Ok(run_partitioned(stream, n, partitions, |rng| {
            cells[sampler.draw(rng.next_f64())].0.clone()
        }))
    }

    /// `n` draws from the exact conditional distribution of all noises given
    /// that the locked value holds; every row satisfies the lock and no
    /// discarded draws ever exist.
    pub fn sample_constrained(
        &self,
        n: u64,
        stream: &RandomStream,
        partitions: u32,
    ) -> Result<Dataset> {
        let constraint = self.constraint.ok_or(Error::ConstraintMissing)?;
        if n == 0 {
            return Err(Error::NoTrials);
        }
        let cells: Vec<(Row, f64)> = self
            .enumerate_cells(None)
            .into_iter()
            .filter(|(row, _)| row.values[constraint.variable] == constraint.value)
            .collect();
        let rows = self.sample_cells(cells, n, stream, partitions)?;
        Ok(Dataset::from_scm(self, rows, Provenance::Constrained))
    }

    fn check_intervention(&self, variable: &str, value: usize) -> Result<(usize, usize)> {
        let idx = self.variable_index(variable)?;
        if !self.variables[idx].is_choice() {
            return Err(Error::InvalidIntervention(variable.to_string()));
        }
        if value >= self.variables[idx].cardinality {
            return Err(Error::ValueOutOfDomain {
                variable: variable.to_string(),
                value,
            });
        }
        Ok((idx, value))
    }

    /// Noise-fixed counterfactual: hold all noise terms, force
    /// `variable = value`, re-evaluate descendants. An involution under a
    /// double flip of binary choices.
    pub fn counterfactual_fixed_noise(
        &self,
        row: &Row,
        variable: &str,
        value: usize,
    ) -> Result<Row> {
        let intervention = self.check_intervention(variable, value)?;
        Ok(Row {
            values: self.evaluate(&row.noise, Some(intervention)),
            noise: row.noise.clone(),
        })
    }

    /// Constrained counterfactual: `n` draws from the conditional
    /// distribution of all noises given that the intervention is applied and
    /// the locked value still holds. `row` must itself satisfy the lock; the
    /// counterfactual of a single run is a distribution, not a row.
    pub fn counterfactual_constrained(
        &self,
        row: &Row,
        variable: &str,
        value: usize,
        n: u64,
        stream: &RandomStream,
        partitions: u32,
    ) -> Result<Dataset> {
        let constraint = self.constraint.ok_or(Error::ConstraintMissing)?;
        if row.values[constraint.variable] != constraint.value {
            return Err(Error::RowViolatesConstraint);
        }
        if n == 0 {
            return Err(Error::NoTrials);
        }
        let intervention = self.check_intervention(variable, value)?;
        let cells: Vec<(Row, f64)> = self
            .enumerate_cells(Some(intervention))
            .into_iter()
            .filter(|(r, _)| r.values[constraint.variable] == constraint.value)
            .collect();
        let rows = self.sample_cells(cells, n, stream, partitions)?;
        Ok(Dataset::from_scm(self, rows, Provenance::Constrained))
    }
}
