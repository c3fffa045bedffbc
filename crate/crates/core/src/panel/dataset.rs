use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::validate::{validate, Violation};
use super::PanelError;

/// Region code, e.g. `"1"` or a NUTS code.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegionId(pub String);

/// Industry code, e.g. `"1"` or a NACE code.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndustryId(pub String);

impl RegionId {
    pub fn new(code: impl Into<String>) -> Self {
        Self(code.into())
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl IndustryId {
    pub fn new(code: impl Into<String>) -> Self {
        Self(code.into())
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&self.0)
    }
}

impl fmt::Display for IndustryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&self.0)
    }
}

/// One (region, industry, year) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelObservation {
    pub region: RegionId,
    pub industry: IndustryId,
    pub year: i32,
    /// Salaried employees (persons).
    pub employment: f64,
    /// Nominal wage bill.
    pub wage_bill: f64,
    /// Flow of goods from this region to the core region.
    pub goods_flow: f64,
    /// Additional numeric columns carried through to the feature rows.
    #[serde(default)]
    pub extras: BTreeMap<String, f64>,
}

/// Raw ingredients of a [`PanelDataset`].
#[derive(Debug, Clone, Default)]
pub struct PanelParts {
    pub observations: Vec<PanelObservation>,
    pub region_totals: Vec<(RegionId, i32, f64)>,
    pub national_totals: Vec<(i32, f64)>,
    /// National employment per industry-year. `None` means the panel's regions
    /// make up the whole nation.
    pub national_industry_totals: Option<Vec<(IndustryId, i32, f64)>>,
    /// Defaults to the first region in order.
    pub core_region: Option<RegionId>,
    pub region_order: Option<Vec<RegionId>>,
    pub industry_order: Option<Vec<IndustryId>>,
    pub flows_time_invariant: bool,
}

/// Validated, immutable region × industry × year panel.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelDataset {
    observations: Vec<PanelObservation>,
    regions: Vec<RegionId>,
    industries: Vec<IndustryId>,
    years: Vec<i32>,
    region_totals: BTreeMap<(RegionId, i32), f64>,
    national_totals: BTreeMap<i32, f64>,
    national_industry_totals: Option<BTreeMap<(IndustryId, i32), f64>>,
    core_region: RegionId,
    flows_time_invariant: bool,
    extra_columns: Vec<String>,
}

/// Sorts codes numerically when every code parses as an integer, otherwise
/// lexicographically.
pub fn natural_order(codes: &mut [String]) {
    if codes.iter().all(|c| c.trim().parse::<i64>().is_ok()) {
        codes.sort_by_key(|c| c.trim().parse::<i64>().unwrap());
    } else {
        codes.sort();
    }
}

fn ordered<T, F>(seen: BTreeSet<String>, explicit: Option<Vec<T>>, wrap: F) -> Result<Vec<T>, PanelError>
where
    T: fmt::Display,
    F: Fn(String) -> T,
{
    match explicit {
        Some(order) => {
            let listed: BTreeSet<String> = order.iter().map(|t| t.to_string()).collect();
            if listed.len() != order.len() {
                return Err(PanelError::BadOrder("duplicate code in order list".into()));
            }
            if let Some(missing) = seen.difference(&listed).next() {
                return Err(PanelError::BadOrder(format!("`{missing}` present in data but not listed")));
            }
            Ok(order)
        }
        None => {
            let mut codes: Vec<String> = seen.into_iter().collect();
            natural_order(&mut codes);
            Ok(codes.into_iter().map(wrap).collect())
        }
    }
}

impl PanelDataset {
    /// Builds and validates a dataset. Any invariant violation is an error.
    pub fn new(parts: PanelParts) -> Result<Self, PanelError> {
        let dataset = Self::new_unchecked(parts)?;
        let violations = validate(&dataset);
        if violations.is_empty() {
            Ok(dataset)
        } else {
            Err(violations_to_error(violations))
        }
    }

    /// Builds a dataset without checking the panel invariants. Orders
    /// observations and resolves the region/industry orderings only.
    pub fn new_unchecked(parts: PanelParts) -> Result<Self, PanelError> {
        let PanelParts {
            mut observations,
            region_totals,
            national_totals,
            national_industry_totals,
            core_region,
            region_order,
            industry_order,
            flows_time_invariant,
        } = parts;
        if observations.is_empty() {
            return Err(PanelError::Empty);
        }
        let seen_regions = observations.iter().map(|o| o.region.0.clone()).collect();
        let seen_industries = observations.iter().map(|o| o.industry.0.clone()).collect();
        let regions = ordered(seen_regions, region_order, RegionId)?;
        let industries = ordered(seen_industries, industry_order, IndustryId)?;
        let years: Vec<i32> = observations.iter().map(|o| o.year).collect::<BTreeSet<_>>().into_iter().collect();

        let region_pos: BTreeMap<&RegionId, usize> = regions.iter().enumerate().map(|(i, r)| (r, i)).collect();
        let industry_pos: BTreeMap<&IndustryId, usize> = industries.iter().enumerate().map(|(i, r)| (r, i)).collect();
        observations.sort_by(|a, b| {
            (region_pos[&a.region], industry_pos[&a.industry], a.year).cmp(&(
                region_pos[&b.region],
                industry_pos[&b.industry],
                b.year,
            ))
        });

        let core_region = match core_region {
            Some(c) if region_pos.contains_key(&c) => c,
            Some(c) => return Err(PanelError::UnknownCoreRegion(c.0)),
            None => regions[0].clone(),
        };
        let extra_columns: Vec<String> =
            observations.iter().flat_map(|o| o.extras.keys().cloned()).collect::<BTreeSet<_>>().into_iter().collect();

        Ok(Self {
            observations,
            regions,
            industries,
            years,
            region_totals: region_totals.into_iter().map(|(r, y, v)| ((r, y), v)).collect(),
            national_totals: national_totals.into_iter().collect(),
            national_industry_totals: national_industry_totals
                .map(|v| v.into_iter().map(|(j, y, x)| ((j, y), x)).collect()),
            core_region,
            flows_time_invariant,
            extra_columns,
        })
    }

    pub fn observations(&self) -> &[PanelObservation] {
        &self.observations
    }
    pub fn regions(&self) -> &[RegionId] {
        &self.regions
    }
    pub fn industries(&self) -> &[IndustryId] {
        &self.industries
    }
    pub fn years(&self) -> &[i32] {
        &self.years
    }
    pub fn region_totals(&self) -> &BTreeMap<(RegionId, i32), f64> {
        &self.region_totals
    }
    pub fn national_totals(&self) -> &BTreeMap<i32, f64> {
        &self.national_totals
    }
    pub fn national_industry_totals(&self) -> Option<&BTreeMap<(IndustryId, i32), f64>> {
        self.national_industry_totals.as_ref()
    }
    pub fn core_region(&self) -> &RegionId {
        &self.core_region
    }
    pub fn flows_time_invariant(&self) -> bool {
        self.flows_time_invariant
    }
    pub fn extra_columns(&self) -> &[String] {
        &self.extra_columns
    }
    pub fn len(&self) -> usize {
        self.observations.len()
    }
    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// Regional manufacturing employment summed over industries.
    pub fn manufacturing_total(&self, region: &RegionId, year: i32) -> f64 {
        self.observations.iter().filter(|o| &o.region == region && o.year == year).map(|o| o.employment).sum()
    }

    /// Dense view of a balanced panel, indexed by position in the region,
    /// industry and year orderings.
    pub fn cube(&self) -> Result<PanelCube, PanelError> {
        let (nr, nj, nt) = (self.regions.len(), self.industries.len(), self.years.len());
        if self.observations.len() != nr * nj * nt {
            let missing = validate(self)
                .into_iter()
                .filter_map(|v| match v {
                    Violation::MissingCell { region, industry, year } => Some((region.0, industry.0, year)),
                    _ => None,
                })
                .collect();
            return Err(PanelError::UnbalancedPanel { missing });
        }
        let mut cube = PanelCube::zeros(nr, nj, nt, self.extra_columns.clone());
        for (k, obs) in self.observations.iter().enumerate() {
            // observations are sorted by (region, industry, year) and balanced
            let (i, j, t) = (k / (nj * nt), (k / nt) % nj, k % nt);
            let idx = cube.cell(i, j, t);
            cube.employment[idx] = obs.employment;
            cube.wage_bill[idx] = obs.wage_bill;
            cube.goods_flow[idx] = obs.goods_flow;
            for (e, name) in self.extra_columns.iter().enumerate() {
                cube.extras[e][idx] = obs.extras.get(name).copied().unwrap_or(f64::NAN);
            }
        }
        for (i, r) in self.regions.iter().enumerate() {
            for (t, y) in self.years.iter().enumerate() {
                cube.region_totals[i * nt + t] = self.region_totals.get(&(r.clone(), *y)).copied().unwrap_or(f64::NAN);
            }
        }
        for (t, y) in self.years.iter().enumerate() {
            cube.national_totals[t] = self.national_totals.get(y).copied().unwrap_or(f64::NAN);
        }
        for (j, ind) in self.industries.iter().enumerate() {
            for (t, y) in self.years.iter().enumerate() {
                cube.national_industry[j * nt + t] = match &self.national_industry_totals {
                    Some(m) => m.get(&(ind.clone(), *y)).copied().unwrap_or(f64::NAN),
                    None => (0..nr).map(|i| cube.employment[cube.cell(i, j, t)]).sum(),
                };
            }
        }
        Ok(cube)
    }
}

fn violations_to_error(violations: Vec<Violation>) -> PanelError {
    if let Some(Violation::NonPositiveEmployment { region, industry, year, value }) =
        violations.iter().find(|v| matches!(v, Violation::NonPositiveEmployment { .. })).cloned()
    {
        return PanelError::NonPositiveEmployment { region: region.0, industry: industry.0, year, value };
    }
    let missing: Vec<_> = violations
        .iter()
        .filter_map(|v| match v {
            Violation::MissingCell { region, industry, year } => Some((region.0.clone(), industry.0.clone(), *year)),
            _ => None,
        })
        .collect();
    if !missing.is_empty() {
        return PanelError::UnbalancedPanel { missing };
    }
    if let Some(Violation::NonContiguousYears { years }) =
        violations.iter().find(|v| matches!(v, Violation::NonContiguousYears { .. })).cloned()
    {
        return PanelError::NonContiguousYears { years };
    }
    if violations.iter().all(Violation::is_totals) {
        return PanelError::TotalsInconsistent { details: violations.iter().map(|v| v.to_string()).collect() };
    }
    PanelError::Invalid { violations }
}

/// Dense arrays for a balanced panel. Cell `(i, j, t)` lives at
/// `(i * n_industries + j) * n_years + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelCube {
    pub n_regions: usize,
    pub n_industries: usize,
    pub n_years: usize,
    pub employment: Vec<f64>,
    pub wage_bill: Vec<f64>,
    pub goods_flow: Vec<f64>,
    /// `i * n_years + t`
    pub region_totals: Vec<f64>,
    /// `t`
    pub national_totals: Vec<f64>,
    /// National employment per industry, `j * n_years + t`.
    pub national_industry: Vec<f64>,
    pub extra_names: Vec<String>,
    /// One dense array per extra column, cell-indexed.
    pub extras: Vec<Vec<f64>>,
}

impl PanelCube {
    pub fn zeros(n_regions: usize, n_industries: usize, n_years: usize, extra_names: Vec<String>) -> Self {
        let cells = n_regions * n_industries * n_years;
        Self {
            n_regions,
            n_industries,
            n_years,
            employment: vec![0.0; cells],
            wage_bill: vec![0.0; cells],
            goods_flow: vec![0.0; cells],
            region_totals: vec![0.0; n_regions * n_years],
            national_totals: vec![0.0; n_years],
            national_industry: vec![0.0; n_industries * n_years],
            extras: vec![vec![0.0; cells]; extra_names.len()],
            extra_names,
        }
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize, t: usize) -> usize {
        (i * self.n_industries + j) * self.n_years + t
    }

    #[inline]
    pub fn employment(&self, i: usize, j: usize, t: usize) -> f64 {
        self.employment[self.cell(i, j, t)]
    }

    #[inline]
    pub fn region_total(&self, i: usize, t: usize) -> f64 {
        self.region_totals[i * self.n_years + t]
    }

    #[inline]
    pub fn national_industry(&self, j: usize, t: usize) -> f64 {
        self.national_industry[j * self.n_years + t]
    }

    /// Manufacturing employment of region `i` (sum over industries).
    pub fn regional_manufacturing(&self, i: usize, t: usize) -> f64 {
        (0..self.n_industries).map(|j| self.employment(i, j, t)).sum()
    }
}
