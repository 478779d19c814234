//! Bounded-integer constraint programs and exact assignment checking.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::params::ObjectiveType;
use crate::error::{Error, Result};

/// Index of a variable; variables are stored in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub u32);

impl VarId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum VarRole {
    /// `q`: units purchased on an offer.
    PurchaseQty { offer_id: String, vendor_id: String, product_id: String },
    /// `b`: offer used.
    OfferUsed { offer_id: String },
    /// `a`: units assembled on a BOM route.
    AssemblyQty { bom_id: String, workcenter_id: Option<String> },
    /// `s`: stock allocated to an order.
    StockAlloc { order_id: String },
    /// Order accepted by screening.
    Accept { order_id: String },
    /// At least one offer of the vendor used.
    VendorUsed { vendor_id: String },
    /// `|x - baseline|` for a plan variable.
    RepairDeviation { of: VarId },
    /// Free-standing variable (hand-built and randomized programs).
    Generic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableDecl {
    pub id: VarId,
    pub name: String,
    pub role: VarRole,
    pub lower: i64,
    pub upper: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl Comparator {
    pub fn holds(self, lhs: i128, rhs: i128) -> bool {
        match self {
            Comparator::Le => lhs <= rhs,
            Comparator::Ge => lhs >= rhs,
            Comparator::Eq => lhs == rhs,
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparator::Le => "<=",
            Comparator::Ge => ">=",
            Comparator::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub name: String,
    pub terms: Vec<(VarId, i64)>,
    pub cmp: Comparator,
    pub rhs: i64,
}

impl LinearConstraint {
    pub fn new(name: impl Into<String>, terms: Vec<(VarId, i64)>, cmp: Comparator, rhs: i64) -> Self {
        LinearConstraint { name: name.into(), terms, cmp, rhs }
    }

    pub fn activity(&self, values: &[i64]) -> i128 {
        self.terms
            .iter()
            .map(|(v, c)| *c as i128 * values[v.idx()] as i128)
            .sum()
    }

    pub fn holds(&self, values: &[i64]) -> bool {
        self.cmp.holds(self.activity(values), self.rhs as i128)
    }
}

/// `lower * b <= q <= upper * b` with `b` in {0, 1}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndicatorLink {
    pub indicator: VarId,
    pub quantity: VarId,
    pub lower: i64,
    pub upper: i64,
}

impl IndicatorLink {
    pub fn holds(&self, values: &[i64]) -> bool {
        let b = values[self.indicator.idx()];
        let q = values[self.quantity.idx()];
        self.lower * b <= q && q <= self.upper * b
    }

    /// The link as two linear rows.
    pub fn as_linear(&self) -> [LinearConstraint; 2] {
        [
            LinearConstraint::new(
                "tier_min",
                vec![(self.quantity, 1), (self.indicator, -self.lower)],
                Comparator::Ge,
                0,
            ),
            LinearConstraint::new(
                "tier_max",
                vec![(self.quantity, 1), (self.indicator, -self.upper)],
                Comparator::Le,
                0,
            ),
        ]
    }
}

/// A linear objective to minimize: `sum(coeff * x)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearObjective {
    pub terms: Vec<(VarId, i64)>,
}

impl LinearObjective {
    pub fn zero() -> Self {
        LinearObjective::default()
    }

    pub fn single(var: VarId) -> Self {
        LinearObjective { terms: vec![(var, 1)] }
    }

    pub fn value(&self, values: &[i64]) -> i64 {
        self.terms.iter().map(|(v, c)| c * values[v.idx()]).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, c)| *c == 0)
    }

    /// `objective <= bound` as a constraint.
    pub fn pin(&self, name: &str, bound: i64) -> LinearConstraint {
        LinearConstraint::new(name, self.terms.clone(), Comparator::Le, bound)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub objective_type: ObjectiveType,
    /// Linear weights the solver minimizes for the primary objective.
    pub primary_coeffs: Vec<(VarId, i64)>,
    pub secondary_spend_coeffs: Option<Vec<(VarId, i64)>>,
    /// Plan variables and their seeded values (repair distance).
    pub baseline_assignment: Option<Vec<(VarId, i64)>>,
}

impl ObjectiveSpec {
    pub fn primary(&self) -> LinearObjective {
        LinearObjective { terms: self.primary_coeffs.clone() }
    }

    pub fn secondary(&self) -> Option<LinearObjective> {
        self.secondary_spend_coeffs
            .as_ref()
            .map(|t| LinearObjective { terms: t.clone() })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintProgram {
    pub variables: Vec<VariableDecl>,
    pub linear_constraints: Vec<LinearConstraint>,
    pub indicator_links: Vec<IndicatorLink>,
    pub objective: ObjectiveSpec,
    pub canonical_order: Vec<VarId>,
}

/// A full assignment, indexed by [`VarId`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment(pub Vec<i64>);

impl Assignment {
    pub fn get(&self, v: VarId) -> i64 {
        self.0[v.idx()]
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    /// Builds an assignment from `name -> value`; every program variable must be present.
    pub fn from_named(program: &ConstraintProgram, named: &BTreeMap<String, i64>) -> Result<Self> {
        program
            .variables
            .iter()
            .map(|v| {
                named
                    .get(&v.name)
                    .copied()
                    .ok_or_else(|| Error::MissingVariable(v.name.clone()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Assignment)
    }

    pub fn to_named(&self, program: &ConstraintProgram) -> BTreeMap<String, i64> {
        program
            .variables
            .iter()
            .map(|v| (v.name.clone(), self.get(v.id)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub constraint: String,
    pub detail: String,
}

/// Per-constraint verdicts; `violations` is empty iff the assignment is feasible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub satisfied: Vec<String>,
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

impl ConstraintProgram {
    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    /// Linear constraints plus indicator links expanded to rows.
    pub fn num_constraints(&self) -> usize {
        self.linear_constraints.len() + 2 * self.indicator_links.len()
    }

    pub fn var(&self, v: VarId) -> &VariableDecl {
        &self.variables[v.idx()]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.variables.iter().find(|v| v.name == name).map(|v| v.id)
    }

    pub fn lower_bounds(&self) -> Vec<i64> {
        self.variables.iter().map(|v| v.lower).collect()
    }

    pub fn upper_bounds(&self) -> Vec<i64> {
        self.variables.iter().map(|v| v.upper).collect()
    }

    /// All rows the solver sees: linear constraints followed by expanded indicator links.
    pub fn all_rows(&self) -> Vec<LinearConstraint> {
        let mut rows = self.linear_constraints.clone();
        for link in &self.indicator_links {
            rows.extend(link.as_linear());
        }
        rows
    }

    /// Structural invariants: canonical order is a permutation, links reference declared
    /// variables, bounds are finite and ordered.
    pub fn well_formed(&self) -> Result<()> {
        let n = self.variables.len();
        let bad = |m: String| Err(Error::InconsistentParameters(m));
        for (i, v) in self.variables.iter().enumerate() {
            if v.id.idx() != i {
                return bad(format!("variable {} stored out of place", v.name));
            }
            if v.lower > v.upper {
                return bad(format!("variable {} has empty domain", v.name));
            }
        }
        let seen: BTreeSet<VarId> = self.canonical_order.iter().copied().collect();
        if seen.len() != n || self.canonical_order.len() != n || seen.iter().any(|v| v.idx() >= n) {
            return bad("canonical order is not a permutation of the variables".into());
        }
        let known = |v: &VarId| v.idx() < n;
        for l in &self.indicator_links {
            if !known(&l.indicator) || !known(&l.quantity) {
                return bad("indicator link references undeclared variable".into());
            }
        }
        for c in &self.linear_constraints {
            if !c.terms.iter().all(|(v, _)| known(v)) {
                return bad(format!("constraint {} references undeclared variable", c.name));
            }
        }
        Ok(())
    }

    pub fn check_assignment(&self, assignment: &Assignment) -> Result<FeasibilityReport> {
        if assignment.0.len() != self.variables.len() {
            let missing = self
                .variables
                .get(assignment.0.len())
                .map_or_else(|| "<extra values>".to_string(), |v| v.name.clone());
            return Err(Error::MissingVariable(missing));
        }
        let values = assignment.values();
        let mut report = FeasibilityReport { satisfied: Vec::new(), violations: Vec::new() };
        for v in &self.variables {
            let x = values[v.id.idx()];
            let name = format!("bounds[{}]", v.name);
            if x < v.lower || x > v.upper {
                report.violations.push(Violation {
                    constraint: name,
                    detail: format!("{} = {} outside [{}, {}]", v.name, x, v.lower, v.upper),
                });
            }
        }
        for c in &self.linear_constraints {
            let act = c.activity(values);
            if c.cmp.holds(act, c.rhs as i128) {
                report.satisfied.push(c.name.clone());
            } else {
                report.violations.push(Violation {
                    constraint: c.name.clone(),
                    detail: format!("activity {} {} {} fails", act, c.cmp, c.rhs),
                });
            }
        }
        for l in &self.indicator_links {
            let name = format!("tier[{}]", self.var(l.quantity).name);
            if l.holds(values) {
                report.satisfied.push(name);
            } else {
                report.violations.push(Violation {
                    constraint: name,
                    detail: format!(
                        "{}*{} <= {} <= {}*{} fails",
                        l.lower,
                        values[l.indicator.idx()],
                        values[l.quantity.idx()],
                        l.upper,
                        values[l.indicator.idx()]
                    ),
                });
            }
        }
        Ok(report)
    }

    pub fn is_feasible(&self, values: &[i64]) -> bool {
        values.len() == self.variables.len()
            && self
                .variables
                .iter()
                .all(|v| (v.lower..=v.upper).contains(&values[v.id.idx()]))
            && self.linear_constraints.iter().all(|c| c.holds(values))
            && self.indicator_links.iter().all(|l| l.holds(values))
    }

    /// Realized objective values in business units: `(primary, secondary spend)`.
    pub fn evaluate_objective(&self, assignment: &Assignment) -> Result<(i64, Option<i64>)> {
        if assignment.0.len() != self.variables.len() {
            return Err(Error::MissingVariable("<assignment length>".into()));
        }
        let values = assignment.values();
        let obj = &self.objective;
        let primary = match obj.objective_type {
            ObjectiveType::MinNewSpend | ObjectiveType::CapacityPreservation => {
                obj.primary().value(values)
            }
            ObjectiveType::VendorConsolidation => {
                let vendors: BTreeSet<&str> = self
                    .variables
                    .iter()
                    .filter_map(|v| match &v.role {
                        VarRole::PurchaseQty { vendor_id, .. } if values[v.id.idx()] > 0 => {
                            Some(vendor_id.as_str())
                        }
                        _ => None,
                    })
                    .collect();
                vendors.len() as i64
            }
            ObjectiveType::RepairPlan => obj
                .baseline_assignment
                .as_ref()
                .map_or(0, |base| base.iter().map(|(v, b)| (values[v.idx()] - b).abs()).sum()),
            ObjectiveType::ConstraintOnly => 0,
        };
        let secondary = obj.secondary().map(|s| s.value(values));
        Ok((primary, secondary))
    }
}
