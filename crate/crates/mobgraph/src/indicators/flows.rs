//! Cohort flow matrices for alluvial-style visualization: fractional
//! per-year country masses plus year-to-year transition masses, with
//! beyond-top-N countries collapsed into an OTHER bucket.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::country::Alpha3;
use crate::timeline::AffiliationTimeline;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowDirection {
    /// Cohort whose origin includes the focal country.
    Outgoing,
    /// Cohort affiliated with the focal country at the horizon year.
    Incoming,
}

impl std::str::FromStr for FlowDirection {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "outgoing" => Ok(FlowDirection::Outgoing),
            "incoming" => Ok(FlowDirection::Incoming),
            other => anyhow::bail!("unknown direction {other:?} (outgoing|incoming)"),
        }
    }
}

/// A country kept in the matrix, or the bucket of all truncated countries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FlowNode {
    Country(Alpha3),
    Other,
}

impl FlowNode {
    pub fn as_label(&self) -> String {
        match self {
            FlowNode::Country(c) => c.to_string(),
            FlowNode::Other => "OTHER".to_string(),
        }
    }
}

impl fmt::Display for FlowNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.as_label())
    }
}

impl Serialize for FlowNode {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.as_label())
    }
}

impl<'de> Deserialize<'de> for FlowNode {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        if s == "OTHER" {
            Ok(FlowNode::Other)
        } else {
            Ok(FlowNode::Country(s.parse().map_err(serde::de::Error::custom)?))
        }
    }
}

/// Fractional mass moving from a country in `year` to a country in
/// `year + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub year: i32,
    pub from: FlowNode,
    pub to: FlowNode,
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowMatrix {
    pub first_year: i32,
    pub horizon: i32,
    pub direction: FlowDirection,
    pub focal: Alpha3,
    pub top_n: usize,
    pub cohort_size: u64,
    /// year -> node -> fractional mass; sums to `cohort_size` every year.
    pub per_year_mass: BTreeMap<i32, BTreeMap<FlowNode, f64>>,
    /// Sorted by (year, from, to).
    pub transitions: Vec<Transition>,
}

impl FlowMatrix {
    pub fn is_empty(&self) -> bool {
        self.cohort_size == 0
    }
}

fn in_cohort(
    t: &AffiliationTimeline,
    first_year: i32,
    direction: FlowDirection,
    focal: Alpha3,
    horizon: i32,
) -> bool {
    if t.first_year != first_year || t.horizon() < horizon {
        return false;
    }
    match direction {
        FlowDirection::Outgoing => t.origin.contains(&focal),
        FlowDirection::Incoming => t
            .imputed
            .get(&horizon)
            .is_some_and(|s| s.contains(&focal)),
    }
}

/// Build the cohort flow matrix.
///
/// Each cohort scholar carries total mass 1 in every year, split evenly over
/// its countries; transitions split that mass uniformly over every
/// (from-country, to-country) pair of consecutive years. Countries outside
/// the top `top_n` by total mass (the focal country is always kept) are
/// collapsed into [`FlowNode::Other`].
pub fn flow_matrix(
    timelines: &[AffiliationTimeline],
    first_year: i32,
    direction: FlowDirection,
    focal: Alpha3,
    horizon: i32,
    top_n: usize,
) -> FlowMatrix {
    let cohort: Vec<&AffiliationTimeline> = timelines
        .iter()
        .filter(|t| in_cohort(t, first_year, direction, focal, horizon))
        .collect();

    // total mass per country across all years, for the truncation ranking
    let mut totals: BTreeMap<Alpha3, f64> = BTreeMap::new();
    for t in &cohort {
        for year in first_year..=horizon {
            let set = &t.imputed[&year];
            let share = 1.0 / set.len() as f64;
            for &c in set {
                *totals.entry(c).or_insert(0.0) += share;
            }
        }
    }
    let mut ranked: Vec<(Alpha3, f64)> = totals
        .iter()
        .filter(|(c, _)| **c != focal)
        .map(|(c, m)| (*c, *m))
        .collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let kept: BTreeSet<Alpha3> = ranked
        .iter()
        .take(top_n)
        .map(|(c, _)| *c)
        .chain(std::iter::once(focal))
        .collect();
    let bucket = |c: Alpha3| -> FlowNode {
        if kept.contains(&c) {
            FlowNode::Country(c)
        } else {
            FlowNode::Other
        }
    };

    let mut per_year_mass: BTreeMap<i32, BTreeMap<FlowNode, f64>> = BTreeMap::new();
    let mut transitions: BTreeMap<(i32, FlowNode, FlowNode), f64> = BTreeMap::new();
    for t in &cohort {
        for year in first_year..=horizon {
            let set = &t.imputed[&year];
            let share = 1.0 / set.len() as f64;
            let year_mass = per_year_mass.entry(year).or_default();
            for &c in set {
                *year_mass.entry(bucket(c)).or_insert(0.0) += share;
            }
            if year < horizon {
                let next = &t.imputed[&(year + 1)];
                let pair_mass = 1.0 / (set.len() * next.len()) as f64;
                for &from in set {
                    for &to in next {
                        *transitions
                            .entry((year, bucket(from), bucket(to)))
                            .or_insert(0.0) += pair_mass;
                    }
                }
            }
        }
    }
    FlowMatrix {
        first_year,
        horizon,
        direction,
        focal,
        top_n,
        cohort_size: cohort.len() as u64,
        per_year_mass,
        transitions: transitions
            .into_iter()
            .map(|((year, from, to), mass)| Transition { year, from, to, mass })
            .collect(),
    }
}

/// Render the matrix as a minimal static alluvial diagram in SVG: one
/// stacked column per year, ribbons sized by transition mass.
pub fn render_alluvial_svg(matrix: &FlowMatrix) -> String {
    const WIDTH: f64 = 960.0;
    const HEIGHT: f64 = 540.0;
    const MARGIN: f64 = 40.0;
    const BAR_W: f64 = 14.0;
    const GAP: f64 = 6.0;

    let years: Vec<i32> = matrix.per_year_mass.keys().copied().collect();
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">{} flows, {} cohort {} (n={})</text>\n",
        MARGIN,
        match matrix.direction {
            FlowDirection::Outgoing => "outgoing",
            FlowDirection::Incoming => "incoming",
        },
        matrix.focal,
        matrix.first_year,
        matrix.cohort_size
    ));
    if matrix.is_empty() || years.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }

    let total = matrix.cohort_size as f64;
    let usable_h = HEIGHT - 2.0 * MARGIN;
    let span = (years.len().max(2) - 1) as f64;
    let x_of = |year: i32| MARGIN + (year - years[0]) as f64 / span * (WIDTH - 2.0 * MARGIN);

    // vertical offsets of each node within its year column
    let mut offsets: BTreeMap<(i32, FlowNode), (f64, f64)> = BTreeMap::new();
    for (&year, masses) in &matrix.per_year_mass {
        let n_nodes = masses.len() as f64;
        let scale = (usable_h - GAP * (n_nodes - 1.0)) / total;
        let mut y = MARGIN;
        for (&node, &mass) in masses {
            let h = mass * scale;
            offsets.insert((year, node), (y, h));
            y += h + GAP;
        }
    }

    // ribbons first so bars draw over them
    let mut out_used: BTreeMap<(i32, FlowNode), f64> = BTreeMap::new();
    let mut in_used: BTreeMap<(i32, FlowNode), f64> = BTreeMap::new();
    for tr in &matrix.transitions {
        let (y_from, h_from) = offsets[&(tr.year, tr.from)];
        let (y_to, h_to) = offsets[&(tr.year + 1, tr.to)];
        let from_mass: f64 = matrix.per_year_mass[&tr.year][&tr.from];
        let to_mass: f64 = matrix.per_year_mass[&(tr.year + 1)][&tr.to];
        let h1 = if from_mass > 0.0 { tr.mass / from_mass * h_from } else { 0.0 };
        let h2 = if to_mass > 0.0 { tr.mass / to_mass * h_to } else { 0.0 };
        let o1 = out_used.entry((tr.year, tr.from)).or_insert(0.0);
        let y1 = y_from + *o1;
        *o1 += h1;
        let o2 = in_used.entry((tr.year + 1, tr.to)).or_insert(0.0);
        let y2 = y_to + *o2;
        *o2 += h2;
        let x1 = x_of(tr.year) + BAR_W / 2.0;
        let x2 = x_of(tr.year + 1) - BAR_W / 2.0;
        svg.push_str(&format!(
            "<path d=\"M {x1:.2} {:.2} L {x2:.2} {:.2} L {x2:.2} {:.2} L {x1:.2} {:.2} Z\" fill=\"#7f9fc4\" fill-opacity=\"0.45\"/>\n",
            y1, y2, y2 + h2, y1 + h1
        ));
    }

    for (&year, masses) in &matrix.per_year_mass {
        let x = x_of(year) - BAR_W / 2.0;
        for (&node, _) in masses {
            let (y, h) = offsets[&(year, node)];
            let fill = if node == FlowNode::Country(matrix.focal) {
                "#c44e52"
            } else {
                "#4c72b0"
            };
            svg.push_str(&format!(
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{BAR_W}\" height=\"{h:.2}\" fill=\"{fill}\"/>\n"
            ));
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"9\">{}</text>\n",
                x + BAR_W + 2.0,
                y + h / 2.0,
                node
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            x + BAR_W / 2.0,
            HEIGHT - MARGIN / 2.0,
            year
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indicators::tests::imputed_timeline;

    fn code(c: &str) -> Alpha3 {
        c.parse().unwrap()
    }

    fn dense(id: &str, years: &[(i32, &[&str])]) -> AffiliationTimeline {
        imputed_timeline(id, years)
    }

    #[test]
    fn single_stayer_self_transitions() {
        let t = dense("a", &[(2008, &["ESP"]), (2010, &["ESP"])]);
        let m = flow_matrix(&[t], 2008, FlowDirection::Outgoing, code("ESP"), 2010, 10);
        assert_eq!(m.cohort_size, 1);
        for year in 2008..=2010 {
            assert_eq!(m.per_year_mass[&year][&FlowNode::Country(code("ESP"))], 1.0);
        }
        assert_eq!(m.transitions.len(), 2);
        for tr in &m.transitions {
            assert_eq!(tr.from, FlowNode::Country(code("ESP")));
            assert_eq!(tr.to, FlowNode::Country(code("ESP")));
            assert_eq!(tr.mass, 1.0);
        }
    }

    #[test]
    fn single_mover_transition() {
        let t = dense("a", &[(2008, &["ESP"]), (2009, &["GBR"])]);
        let m = flow_matrix(&[t], 2008, FlowDirection::Outgoing, code("ESP"), 2009, 10);
        assert_eq!(m.transitions.len(), 1);
        let tr = &m.transitions[0];
        assert_eq!(
            (tr.year, tr.from, tr.to, tr.mass),
            (2008, FlowNode::Country(code("ESP")), FlowNode::Country(code("GBR")), 1.0)
        );
    }

    #[test]
    fn incoming_cohort_counts_returnees() {
        // leaves ESP, returns by the horizon: belongs to the incoming
        // cohort and its 2008 mass originates in ESP
        let t = dense(
            "r",
            &[(2008, &["ESP"]), (2010, &["USA"]), (2015, &["ESP"])],
        );
        let m = flow_matrix(&[t], 2008, FlowDirection::Incoming, code("ESP"), 2015, 10);
        assert_eq!(m.cohort_size, 1);
        assert_eq!(m.per_year_mass[&2008][&FlowNode::Country(code("ESP"))], 1.0);
        assert_eq!(m.per_year_mass[&2010][&FlowNode::Country(code("USA"))], 1.0);
        assert_eq!(m.per_year_mass[&2015][&FlowNode::Country(code("ESP"))], 1.0);
    }

    #[test]
    fn empty_cohort_is_empty_not_error() {
        let t = dense("a", &[(2008, &["FRA"]), (2010, &["FRA"])]);
        let m = flow_matrix(&[t], 2008, FlowDirection::Outgoing, code("ESP"), 2010, 10);
        assert!(m.is_empty());
        assert!(m.per_year_mass.is_empty());
        assert!(m.transitions.is_empty());
    }

    #[test]
    fn coaffiliation_splits_pair_mass() {
        let t = dense("a", &[(2008, &["ESP"]), (2009, &["ESP", "GBR"])]);
        let m = flow_matrix(&[t], 2008, FlowDirection::Outgoing, code("ESP"), 2009, 10);
        assert_eq!(m.transitions.len(), 2);
        for tr in &m.transitions {
            assert_eq!(tr.mass, 0.5);
        }
        let mass_2009: f64 = m.per_year_mass[&2009].values().sum();
        assert!((mass_2009 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn truncation_buckets_into_other() {
        let timelines = vec![
            dense("a", &[(2008, &["ESP"]), (2009, &["GBR"])]),
            dense("b", &[(2008, &["ESP"]), (2009, &["GBR"])]),
            dense("c", &[(2008, &["ESP"]), (2009, &["FRA"])]),
        ];
        let m = flow_matrix(&timelines, 2008, FlowDirection::Outgoing, code("ESP"), 2009, 1);
        // GBR outranks FRA; FRA collapses into OTHER
        assert!(m.per_year_mass[&2009].contains_key(&FlowNode::Country(code("GBR"))));
        assert_eq!(m.per_year_mass[&2009][&FlowNode::Other], 1.0);
        assert!(!m.per_year_mass[&2009].contains_key(&FlowNode::Country(code("FRA"))));
    }

    #[test]
    fn per_year_mass_conserved() {
        let timelines = vec![
            dense("a", &[(2008, &["ESP"]), (2011, &["ESP", "NLD", "GBR"])]),
            dense("b", &[(2008, &["ESP", "PRT"]), (2011, &["USA"])]),
        ];
        let m = flow_matrix(&timelines, 2008, FlowDirection::Outgoing, code("ESP"), 2011, 10);
        for (_, masses) in &m.per_year_mass {
            let total: f64 = masses.values().sum();
            assert!((total - 2.0).abs() < 1e-9);
        }
        // transition mass out of each year equals the year's mass
        for year in 2008..2011 {
            let out: f64 = m
                .transitions
                .iter()
                .filter(|tr| tr.year == year)
                .map(|tr| tr.mass)
                .sum();
            assert!((out - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn svg_renders_nodes_and_ribbons() {
        let t = dense("a", &[(2008, &["ESP"]), (2009, &["GBR"])]);
        let m = flow_matrix(&[t], 2008, FlowDirection::Outgoing, code("ESP"), 2009, 10);
        let svg = render_alluvial_svg(&m);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("ESP"));
        assert!(svg.contains("<path"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
