use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::dataset::{IndustryId, PanelDataset, RegionId};

/// Relative slack used when comparing totals that are sums of floats.
const TOTALS_RTOL: f64 = 1e-9;

/// One broken panel invariant, naming the offending cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NonPositiveEmployment { region: RegionId, industry: IndustryId, year: i32, value: f64 },
    NonPositiveWageBill { region: RegionId, industry: IndustryId, year: i32, value: f64 },
    NegativeGoodsFlow { region: RegionId, industry: IndustryId, year: i32, value: f64 },
    DuplicateCell { region: RegionId, industry: IndustryId, year: i32 },
    MissingCell { region: RegionId, industry: IndustryId, year: i32 },
    NonContiguousYears { years: Vec<i32> },
    FlowNotTimeInvariant { region: RegionId, industry: IndustryId },
    MissingRegionTotal { region: RegionId, year: i32 },
    ManufacturingExceedsRegionTotal { region: RegionId, year: i32, manufacturing: f64, total: f64 },
    MissingNationalTotal { year: i32 },
    NationalTotalMismatch { year: i32, national: f64, sum_of_regions: f64 },
    RegionTotalsExceedNational { year: i32, national: f64, sum_of_regions: f64 },
    MissingNationalIndustryTotal { industry: IndustryId, year: i32 },
    NationalIndustryBelowRegions { industry: IndustryId, year: i32, national: f64, sum_of_regions: f64 },
    NationalManufacturingExceedsTotal { year: i32, manufacturing: f64, national: f64 },
}

impl Violation {
    /// True for violations about the employment totals.
    pub fn is_totals(&self) -> bool {
        matches!(
            self,
            Violation::MissingRegionTotal { .. }
                | Violation::ManufacturingExceedsRegionTotal { .. }
                | Violation::MissingNationalTotal { .. }
                | Violation::NationalTotalMismatch { .. }
                | Violation::RegionTotalsExceedNational { .. }
                | Violation::MissingNationalIndustryTotal { .. }
                | Violation::NationalIndustryBelowRegions { .. }
                | Violation::NationalManufacturingExceedsTotal { .. }
        )
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NonPositiveEmployment { region, industry, year, value } => {
                write!(f, "employment must be > 0: ({region}, {industry}, {year}) = {value}")
            }
            NonPositiveWageBill { region, industry, year, value } => {
                write!(f, "wage bill must be > 0: ({region}, {industry}, {year}) = {value}")
            }
            NegativeGoodsFlow { region, industry, year, value } => {
                write!(f, "goods flow must be >= 0: ({region}, {industry}, {year}) = {value}")
            }
            DuplicateCell { region, industry, year } => {
                write!(f, "balanced panel: duplicate cell ({region}, {industry}, {year})")
            }
            MissingCell { region, industry, year } => {
                write!(f, "balanced panel: missing cell ({region}, {industry}, {year})")
            }
            NonContiguousYears { years } => write!(f, "years must be contiguous: {years:?}"),
            FlowNotTimeInvariant { region, industry } => {
                write!(f, "time-invariant flows: ({region}, {industry}) varies across years")
            }
            MissingRegionTotal { region, year } => write!(f, "missing region total ({region}, {year})"),
            ManufacturingExceedsRegionTotal { region, year, manufacturing, total } => write!(
                f,
                "manufacturing <= region total: ({region}, {year}) manufacturing {manufacturing} > total {total}"
            ),
            MissingNationalTotal { year } => write!(f, "missing national total for {year}"),
            NationalTotalMismatch { year, national, sum_of_regions } => {
                write!(f, "national total = sum of region totals: year {year} national {national} != {sum_of_regions}")
            }
            RegionTotalsExceedNational { year, national, sum_of_regions } => {
                write!(f, "sum of region totals <= national total: year {year} {sum_of_regions} > {national}")
            }
            MissingNationalIndustryTotal { industry, year } => {
                write!(f, "missing national industry total ({industry}, {year})")
            }
            NationalIndustryBelowRegions { industry, year, national, sum_of_regions } => {
                write!(f, "national industry total >= regional sum: ({industry}, {year}) {national} < {sum_of_regions}")
            }
            NationalManufacturingExceedsTotal { year, manufacturing, national } => {
                write!(f, "national manufacturing <= national total: year {year} {manufacturing} > {national}")
            }
        }
    }
}

fn exceeds(a: f64, b: f64) -> bool {
    a > b + TOTALS_RTOL * b.abs().max(a.abs())
}

/// Checks every panel invariant. Returns an empty list iff the dataset is valid.
pub fn validate(dataset: &PanelDataset) -> Vec<Violation> {
    let mut out = Vec::new();
    let obs = dataset.observations();

    let mut cells: BTreeMap<(&RegionId, &IndustryId, i32), usize> = BTreeMap::new();
    for o in obs {
        *cells.entry((&o.region, &o.industry, o.year)).or_default() += 1;
        let (region, industry, year) = (o.region.clone(), o.industry.clone(), o.year);
        if !(o.employment > 0.0 && o.employment.is_finite()) {
            out.push(Violation::NonPositiveEmployment { region, industry, year, value: o.employment });
        } else if !(o.wage_bill > 0.0 && o.wage_bill.is_finite()) {
            out.push(Violation::NonPositiveWageBill { region, industry, year, value: o.wage_bill });
        } else if !(o.goods_flow >= 0.0 && o.goods_flow.is_finite()) {
            out.push(Violation::NegativeGoodsFlow { region, industry, year, value: o.goods_flow });
        }
    }
    for ((r, i, y), count) in &cells {
        if *count > 1 {
            out.push(Violation::DuplicateCell { region: (*r).clone(), industry: (*i).clone(), year: *y });
        }
    }
    let years = dataset.years();
    for r in dataset.regions() {
        for i in dataset.industries() {
            for &y in years {
                if !cells.contains_key(&(r, i, y)) {
                    out.push(Violation::MissingCell { region: r.clone(), industry: i.clone(), year: y });
                }
            }
        }
    }
    if years.windows(2).any(|w| w[1] != w[0] + 1) {
        out.push(Violation::NonContiguousYears { years: years.to_vec() });
    }

    if dataset.flows_time_invariant() {
        let mut first: BTreeMap<(&RegionId, &IndustryId), f64> = BTreeMap::new();
        let mut flagged = BTreeSet::new();
        for o in obs {
            let v = *first.entry((&o.region, &o.industry)).or_insert(o.goods_flow);
            if v != o.goods_flow && flagged.insert((&o.region, &o.industry)) {
                out.push(Violation::FlowNotTimeInvariant { region: o.region.clone(), industry: o.industry.clone() });
            }
        }
    }

    let mut manufacturing: BTreeMap<(&RegionId, i32), f64> = BTreeMap::new();
    let mut regional_industry: BTreeMap<(&IndustryId, i32), f64> = BTreeMap::new();
    for o in obs {
        *manufacturing.entry((&o.region, o.year)).or_default() += o.employment;
        *regional_industry.entry((&o.industry, o.year)).or_default() += o.employment;
    }
    let totals = dataset.region_totals();
    for &y in years {
        let mut sum_regions = 0.0;
        let mut complete = true;
        for r in dataset.regions() {
            match totals.get(&(r.clone(), y)) {
                None => {
                    complete = false;
                    out.push(Violation::MissingRegionTotal { region: r.clone(), year: y });
                }
                Some(&total) => {
                    sum_regions += total;
                    let m = manufacturing.get(&(r, y)).copied().unwrap_or(0.0);
                    if exceeds(m, total) {
                        out.push(Violation::ManufacturingExceedsRegionTotal {
                            region: r.clone(),
                            year: y,
                            manufacturing: m,
                            total,
                        });
                    }
                }
            }
        }
        let Some(&national) = dataset.national_totals().get(&y) else {
            out.push(Violation::MissingNationalTotal { year: y });
            continue;
        };
        match dataset.national_industry_totals() {
            None => {
                if complete && (sum_regions - national).abs() > TOTALS_RTOL * national.abs().max(1.0) {
                    out.push(Violation::NationalTotalMismatch { year: y, national, sum_of_regions: sum_regions });
                }
            }
            Some(nat_ind) => {
                if complete && exceeds(sum_regions, national) {
                    out.push(Violation::RegionTotalsExceedNational { year: y, national, sum_of_regions: sum_regions });
                }
                let mut national_manufacturing = 0.0;
                for ind in dataset.industries() {
                    match nat_ind.get(&(ind.clone(), y)) {
                        None => out.push(Violation::MissingNationalIndustryTotal { industry: ind.clone(), year: y }),
                        Some(&v) => {
                            national_manufacturing += v;
                            let s = regional_industry.get(&(ind, y)).copied().unwrap_or(0.0);
                            if exceeds(s, v) {
                                out.push(Violation::NationalIndustryBelowRegions {
                                    industry: ind.clone(),
                                    year: y,
                                    national: v,
                                    sum_of_regions: s,
                                });
                            }
                        }
                    }
                }
                if exceeds(national_manufacturing, national) {
                    out.push(Violation::NationalManufacturingExceedsTotal {
                        year: y,
                        manufacturing: national_manufacturing,
                        national,
                    });
                }
            }
        }
    }
    out
}
