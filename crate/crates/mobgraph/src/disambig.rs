//! Author name disambiguation: blocking on (surname, first initial) followed
//! by rule-based pairwise scoring and single-linkage clustering within each
//! block.
//!
//! Scoring compares mention pairs at four levels: author (email, full given
//! name), article (shared coauthors, institutions, countries), publication
//! (venue) and citation (direct citation, shared references). Pairs whose
//! full given names contradict each other score zero regardless of any other
//! rule, which biases the clustering toward splitting.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::{AuthorMention, NameKey, PublicationRecord, Scholar};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ScoringWeights {
    pub w_email: f64,
    pub w_full_given_match: f64,
    /// Per shared coauthor key, total capped at `coauthor_cap`.
    pub w_shared_coauthor: f64,
    pub coauthor_cap: f64,
    pub w_shared_institution: f64,
    pub w_shared_country: f64,
    pub w_same_venue: f64,
    pub w_citation_link: f64,
    /// Per shared reference, total capped at `reference_cap`.
    pub w_shared_reference: f64,
    pub reference_cap: f64,
    pub threshold: f64,
}

impl Default for ScoringWeights {
    fn default() -> Self {
        ScoringWeights {
            w_email: 100.0,
            w_full_given_match: 10.0,
            w_shared_coauthor: 3.0,
            coauthor_cap: 9.0,
            w_shared_institution: 4.0,
            w_shared_country: 1.0,
            w_same_venue: 2.0,
            w_citation_link: 8.0,
            w_shared_reference: 2.0,
            reference_cap: 8.0,
            threshold: 10.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DisambigConfig {
    pub weights: ScoringWeights,
    /// Blocks larger than this are scored with a sorted-neighborhood pass
    /// instead of all pairs.
    pub block_cap: usize,
    pub neighborhood_window: usize,
}

impl Default for DisambigConfig {
    fn default() -> Self {
        DisambigConfig {
            weights: ScoringWeights::default(),
            block_cap: 5000,
            neighborhood_window: 8,
        }
    }
}

/// A mention together with the publication-level fields scoring needs.
#[derive(Debug, Clone)]
pub struct MentionCtx<'a> {
    pub mention: &'a AuthorMention,
    pub year: i32,
    pub venue_id: Option<&'a str>,
    pub references: &'a HashSet<String>,
}

/// Token-wise given-name compatibility: long tokens must match exactly,
/// initials must agree on the first character. "nicolas" vs "n" is
/// compatible, "nicolas" vs "nathan" is not.
pub fn given_names_compatible(a: Option<&str>, b: Option<&str>) -> bool {
    let (a, b) = match (a, b) {
        (Some(a), Some(b)) => (a, b),
        _ => return true,
    };
    for (ta, tb) in a.split(' ').zip(b.split(' ')) {
        let long_a = ta.chars().count() >= 2;
        let long_b = tb.chars().count() >= 2;
        if long_a && long_b {
            if ta != tb {
                return false;
            }
        } else if ta.chars().next() != tb.chars().next() {
            return false;
        }
    }
    true
}

/// Rule-based similarity between two mentions in the same block.
/// Symmetric; zero when the full given names contradict.
pub fn score_pair(a: &MentionCtx, b: &MentionCtx, w: &ScoringWeights) -> f64 {
    let (ma, mb) = (a.mention, b.mention);
    if !given_names_compatible(ma.full_given.as_deref(), mb.full_given.as_deref()) {
        return 0.0;
    }
    let mut score = 0.0;

    // author level
    if let (Some(ea), Some(eb)) = (&ma.email, &mb.email) {
        if ea == eb {
            score += w.w_email;
        }
    }
    if let (Some(fa), Some(fb)) = (&ma.full_given, &mb.full_given) {
        if fa == fb {
            score += w.w_full_given_match;
        }
    }

    // article level
    let shared_coauthors = ma.coauthor_keys.intersection(&mb.coauthor_keys).count();
    score += (shared_coauthors as f64 * w.w_shared_coauthor).min(w.coauthor_cap);
    if ma.institutions.iter().any(|i| mb.institutions.contains(i)) {
        score += w.w_shared_institution;
    }
    if ma.countries.intersection(&mb.countries).next().is_some() {
        score += w.w_shared_country;
    }

    // publication level
    if let (Some(va), Some(vb)) = (a.venue_id, b.venue_id) {
        if va == vb {
            score += w.w_same_venue;
        }
    }

    // citation level
    if a.references.contains(&mb.pub_id) || b.references.contains(&ma.pub_id) {
        score += w.w_citation_link;
    }
    let shared_refs = a.references.intersection(b.references).count();
    score += (shared_refs as f64 * w.w_shared_reference).min(w.reference_cap);

    score
}

/// Group mentions by blocking key. Every mention lands in exactly one block.
pub fn block_mentions<'a>(
    mentions: impl IntoIterator<Item = &'a AuthorMention>,
) -> BTreeMap<NameKey, Vec<String>> {
    let mut blocks: BTreeMap<NameKey, Vec<String>> = BTreeMap::new();
    for m in mentions {
        blocks.entry(m.name_key()).or_default().push(m.mention_id.clone());
    }
    blocks
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Stable scholar id: hash of the sorted mention id list.
pub fn scholar_id_for(mention_ids: &BTreeSet<String>) -> String {
    let mut hasher = Sha256::new();
    for id in mention_ids {
        hasher.update(id.as_bytes());
        hasher.update(b"\n");
    }
    let digest = hasher.finalize();
    format!("s{}", hex::encode(&digest[..8]))
}

fn candidate_pairs(block: &[MentionCtx], cfg: &DisambigConfig) -> Vec<(usize, usize)> {
    if block.len() <= cfg.block_cap {
        let mut pairs = Vec::with_capacity(block.len() * (block.len() - 1) / 2);
        for i in 0..block.len() {
            for j in (i + 1)..block.len() {
                pairs.push((i, j));
            }
        }
        pairs
    } else {
        // sorted-neighborhood: order by discriminating fields, compare
        // within a sliding window
        let mut order: Vec<usize> = (0..block.len()).collect();
        order.sort_by(|&a, &b| {
            let ka = (
                &block[a].mention.email,
                &block[a].mention.full_given,
                block[a].mention.institutions.first(),
                &block[a].mention.mention_id,
            );
            let kb = (
                &block[b].mention.email,
                &block[b].mention.full_given,
                block[b].mention.institutions.first(),
                &block[b].mention.mention_id,
            );
            ka.cmp(&kb)
        });
        let mut pairs = Vec::new();
        for (pos, &i) in order.iter().enumerate() {
            for &j in order.iter().skip(pos + 1).take(cfg.neighborhood_window) {
                pairs.push((i.min(j), i.max(j)));
            }
        }
        pairs
    }
}

/// Single-linkage clustering of one block: union every pair scoring at or
/// above the threshold. Clusters come out ordered by their smallest mention
/// id, which makes the result deterministic.
pub fn cluster_block(block: &[MentionCtx], cfg: &DisambigConfig) -> Vec<Scholar> {
    let mut uf = UnionFind::new(block.len());
    for (i, j) in candidate_pairs(block, cfg) {
        if block[i].mention.pub_id == block[j].mention.pub_id {
            continue;
        }
        if score_pair(&block[i], &block[j], &cfg.weights) >= cfg.weights.threshold {
            uf.union(i, j);
        }
    }
    let mut clusters: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..block.len() {
        let root = uf.find(i);
        clusters.entry(root).or_default().push(i);
    }
    let mut scholars: Vec<Scholar> = clusters
        .into_values()
        .map(|members| {
            let mention_ids: BTreeSet<String> = members
                .iter()
                .map(|&i| block[i].mention.mention_id.clone())
                .collect();
            let mut pubs_by_year: BTreeMap<i32, Vec<String>> = BTreeMap::new();
            for &i in &members {
                let pubs = pubs_by_year.entry(block[i].year).or_default();
                if !pubs.contains(&block[i].mention.pub_id) {
                    pubs.push(block[i].mention.pub_id.clone());
                }
            }
            for pubs in pubs_by_year.values_mut() {
                pubs.sort();
            }
            Scholar {
                scholar_id: scholar_id_for(&mention_ids),
                mention_ids,
                pubs_by_year,
            }
        })
        .collect();
    scholars.sort_by(|a, b| a.mention_ids.iter().next().cmp(&b.mention_ids.iter().next()));
    scholars
}

/// Cluster a whole corpus: block, then cluster blocks independently.
/// The result is a partition of all mentions, ordered by smallest mention id.
pub fn disambiguate(corpus: &[PublicationRecord], cfg: &DisambigConfig) -> Vec<Scholar> {
    let ref_sets: Vec<HashSet<String>> = corpus
        .iter()
        .map(|r| r.references.iter().cloned().collect())
        .collect();
    let mut blocks: BTreeMap<NameKey, Vec<MentionCtx>> = BTreeMap::new();
    for (ri, record) in corpus.iter().enumerate() {
        for mention in &record.mentions {
            blocks.entry(mention.name_key()).or_default().push(MentionCtx {
                mention,
                year: record.year,
                venue_id: record.venue_id.as_deref(),
                references: &ref_sets[ri],
            });
        }
    }
    let block_list: Vec<_> = blocks.into_values().collect();
    let mut scholars: Vec<Scholar> = block_list
        .par_iter()
        .map(|block| cluster_block(block, cfg))
        .flatten()
        .collect();
    scholars.sort_by(|a, b| a.mention_ids.iter().next().cmp(&b.mention_ids.iter().next()));
    scholars
}

/// Build scholars from an externally supplied mention→scholar mapping,
/// bypassing scoring entirely.
pub fn scholars_from_precluster(
    corpus: &[PublicationRecord],
    mapping: &HashMap<String, String>,
) -> anyhow::Result<Vec<Scholar>> {
    let mut groups: BTreeMap<&str, (BTreeSet<String>, BTreeMap<i32, Vec<String>>)> =
        BTreeMap::new();
    for record in corpus {
        for mention in &record.mentions {
            let label = mapping.get(&mention.mention_id).ok_or_else(|| {
                anyhow::anyhow!("precluster mapping missing mention {}", mention.mention_id)
            })?;
            let (ids, pubs) = groups.entry(label).or_default();
            ids.insert(mention.mention_id.clone());
            let year_pubs = pubs.entry(record.year).or_default();
            if !year_pubs.contains(&record.pub_id) {
                year_pubs.push(record.pub_id.clone());
            }
        }
    }
    let mut scholars: Vec<Scholar> = groups
        .into_values()
        .map(|(mention_ids, mut pubs_by_year)| {
            for pubs in pubs_by_year.values_mut() {
                pubs.sort();
            }
            Scholar {
                scholar_id: scholar_id_for(&mention_ids),
                mention_ids,
                pubs_by_year,
            }
        })
        .collect();
    scholars.sort_by(|a, b| a.mention_ids.iter().next().cmp(&b.mention_ids.iter().next()));
    Ok(scholars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::country::CountryTable;
    use crate::ingest::{parse_publications, IngestConfig};
    use crate::model::YearWindow;

    fn parse(text: &str) -> Vec<PublicationRecord> {
        let cfg = IngestConfig {
            window: YearWindow::new(2000, 2020).unwrap(),
        };
        parse_publications(text.as_bytes(), &cfg, CountryTable::bundled())
            .unwrap()
            .0
    }

    fn ctxs<'a>(
        corpus: &'a [PublicationRecord],
        refs: &'a [HashSet<String>],
    ) -> Vec<MentionCtx<'a>> {
        corpus
            .iter()
            .enumerate()
            .flat_map(|(i, r)| {
                r.mentions.iter().map(move |m| MentionCtx {
                    mention: m,
                    year: r.year,
                    venue_id: r.venue_id.as_deref(),
                    references: &refs[i],
                })
            })
            .collect()
    }

    fn ref_sets(corpus: &[PublicationRecord]) -> Vec<HashSet<String>> {
        corpus
            .iter()
            .map(|r| r.references.iter().cloned().collect())
            .collect()
    }

    #[test]
    fn blocking_groups_by_surname_and_initial() {
        let corpus = parse(concat!(
            r#"{"pub_id":"p1","year":2010,"authors":[{"surname":"Garcia","given":"Nicolas"}]}"#,
            "\n",
            r#"{"pub_id":"p2","year":2011,"authors":[{"surname":"Garcia","given":"n."}]}"#,
            "\n",
            r#"{"pub_id":"p3","year":2011,"authors":[{"surname":"Smith","given":"J."}]}"#,
        ));
        let mentions: Vec<&AuthorMention> =
            corpus.iter().flat_map(|r| r.mentions.iter()).collect();
        let blocks = block_mentions(mentions.into_iter());
        assert_eq!(blocks.len(), 2);
        let garcia = NameKey {
            surname: "garcia".into(),
            first_initial: 'n',
        };
        assert_eq!(blocks[&garcia].len(), 2);
        let total: usize = blocks.values().map(|v| v.len()).sum();
        assert_eq!(total, 3);
    }

    #[test]
    fn empty_mention_list_gives_empty_blocks() {
        assert!(block_mentions(std::iter::empty()).is_empty());
    }

    #[test]
    fn email_alone_reaches_score() {
        let corpus = parse(concat!(
            r#"{"pub_id":"p1","year":2010,"authors":[{"surname":"A","given":"B","email":"x@y.z"}]}"#,
            "\n",
            r#"{"pub_id":"p2","year":2011,"authors":[{"surname":"A","given":"B","email":"x@y.z"}]}"#,
        ));
        let refs = ref_sets(&corpus);
        let cs = ctxs(&corpus, &refs);
        let w = ScoringWeights::default();
        assert_eq!(score_pair(&cs[0], &cs[1], &w), 100.0);
        assert_eq!(score_pair(&cs[1], &cs[0], &w), 100.0);
    }

    #[test]
    fn no_shared_features_scores_zero() {
        let corpus = parse(concat!(
            r#"{"pub_id":"p1","year":2010,"venue_id":"v1","authors":[{"surname":"A","given":"B."}]}"#,
            "\n",
            r#"{"pub_id":"p2","year":2011,"venue_id":"v2","authors":[{"surname":"A","given":"B."}]}"#,
        ));
        let refs = ref_sets(&corpus);
        let cs = ctxs(&corpus, &refs);
        assert_eq!(score_pair(&cs[0], &cs[1], &ScoringWeights::default()), 0.0);
    }

    #[test]
    fn weighted_sum_with_coauthor_cap() {
        // shared venue (2) + 2 shared coauthor keys at 3 each capped at 6
        // + shared country (1) = 9
        let corpus = parse(concat!(
            r#"{"pub_id":"p1","year":2010,"venue_id":"v","authors":[{"surname":"A","given":"B.","affiliations":[{"country":"ESP"}]},{"surname":"C","given":"D."},{"surname":"E","given":"F."}]}"#,
            "\n",
            r#"{"pub_id":"p2","year":2011,"venue_id":"v","authors":[{"surname":"A","given":"B.","affiliations":[{"country":"ESP"}]},{"surname":"C","given":"D."},{"surname":"E","given":"F."}]}"#,
        ));
        let refs = ref_sets(&corpus);
        let cs = ctxs(&corpus, &refs);
        let a = cs.iter().find(|c| c.mention.mention_id == "p1#0").unwrap();
        let b = cs.iter().find(|c| c.mention.mention_id == "p2#0").unwrap();
        let w = ScoringWeights {
            coauthor_cap: 6.0,
            ..ScoringWeights::default()
        };
        assert_eq!(score_pair(a, b, &w), 9.0);
    }

    #[test]
    fn contradictory_given_names_veto() {
        let corpus = parse(concat!(
            r#"{"pub_id":"p1","year":2010,"authors":[{"surname":"A","given":"Nicolas","email":"x@y.z"}]}"#,
            "\n",
            r#"{"pub_id":"p2","year":2011,"authors":[{"surname":"A","given":"Nathan","email":"x@y.z"}]}"#,
        ));
        let refs = ref_sets(&corpus);
        let cs = ctxs(&corpus, &refs);
        assert_eq!(score_pair(&cs[0], &cs[1], &ScoringWeights::default()), 0.0);
    }

    #[test]
    fn single_linkage_transitivity() {
        // (1,2) and (2,3) share emails pairwise via two addresses; (1,3) share nothing
        let corpus = parse(concat!(
            r#"{"pub_id":"p1","year":2010,"venue_id":"v1","authors":[{"surname":"A","given":"B.","email":"e1@x"}]}"#,
            "\n",
            r#"{"pub_id":"p2","year":2011,"venue_id":"v2","authors":[{"surname":"A","given":"B.","email":"e1@x"}]}"#,
            "\n",
            r#"{"pub_id":"p3","year":2012,"venue_id":"v2","authors":[{"surname":"A","given":"B.","email":"e2@x"}]}"#,
        ));
        let refs = ref_sets(&corpus);
        let cs = ctxs(&corpus, &refs);
        // (1,2): email 100. (2,3): same venue only = 2 < 10. Lower threshold so
        // (2,3) links but (1,3) (score 0) does not; transitivity must merge all.
        let cfg = DisambigConfig {
            weights: ScoringWeights {
                threshold: 2.0,
                ..ScoringWeights::default()
            },
            ..DisambigConfig::default()
        };
        let scholars = cluster_block(&cs, &cfg);
        assert_eq!(scholars.len(), 1);
        assert_eq!(scholars[0].mention_ids.len(), 3);
    }

    #[test]
    fn below_threshold_splits() {
        let corpus = parse(concat!(
            r#"{"pub_id":"p1","year":2010,"venue_id":"v","authors":[{"surname":"A","given":"B."}]}"#,
            "\n",
            r#"{"pub_id":"p2","year":2011,"venue_id":"v","authors":[{"surname":"A","given":"B."}]}"#,
        ));
        let refs = ref_sets(&corpus);
        let cs = ctxs(&corpus, &refs);
        let scholars = cluster_block(&cs, &DisambigConfig::default());
        assert_eq!(scholars.len(), 2);
    }

    #[test]
    fn zero_threshold_merges_whole_block() {
        let corpus = parse(concat!(
            r#"{"pub_id":"p1","year":2010,"authors":[{"surname":"A","given":"B."}]}"#,
            "\n",
            r#"{"pub_id":"p2","year":2011,"authors":[{"surname":"A","given":"B."}]}"#,
        ));
        let cfg = DisambigConfig {
            weights: ScoringWeights {
                threshold: 0.0,
                ..ScoringWeights::default()
            },
            ..DisambigConfig::default()
        };
        let scholars = disambiguate(&corpus, &cfg);
        assert_eq!(scholars.len(), 1);
    }

    #[test]
    fn partition_holds_corpus_wide() {
        let corpus = parse(concat!(
            r#"{"pub_id":"p1","year":2010,"authors":[{"surname":"A","given":"B.","email":"e@x"},{"surname":"C","given":"D."}]}"#,
            "\n",
            r#"{"pub_id":"p2","year":2011,"authors":[{"surname":"A","given":"B.","email":"e@x"},{"surname":"C","given":"D."}]}"#,
        ));
        let scholars = disambiguate(&corpus, &DisambigConfig::default());
        let mut seen = BTreeSet::new();
        for s in &scholars {
            for id in &s.mention_ids {
                assert!(seen.insert(id.clone()), "mention {id} in two scholars");
            }
        }
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn scholar_id_stable() {
        let ids: BTreeSet<String> = ["p1#0", "p2#0"].iter().map(|s| s.to_string()).collect();
        assert_eq!(scholar_id_for(&ids), scholar_id_for(&ids.clone()));
    }

    #[test]
    fn same_pub_mentions_never_pair() {
        // two same-key mentions on one publication stay separate even at
        // threshold zero within the pair
        let corpus = parse(
            r#"{"pub_id":"p1","year":2010,"authors":[{"surname":"A","given":"B."},{"surname":"A","given":"B."}]}"#,
        );
        let cfg = DisambigConfig {
            weights: ScoringWeights {
                threshold: 0.0,
                ..ScoringWeights::default()
            },
            ..DisambigConfig::default()
        };
        let scholars = disambiguate(&corpus, &cfg);
        assert_eq!(scholars.len(), 2);
    }
}
