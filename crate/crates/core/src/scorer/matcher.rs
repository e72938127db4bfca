use std::collections::HashMap;

use crate::lexicon::Lexicon;
use crate::textprep::stem;

#[derive(Debug, Default, Clone)]
struct Node {
    children: HashMap<u32, u32>,
    /// Entries whose full key ends at this node, at most one per category.
    terminals: Vec<u32>,
}

/// Lexicon keys compiled into a trie over stem ids.
///
/// Every key (unigram or phrase) is a path from the root. Scanning walks the
/// trie from each token position, so the cost is bounded by
/// `tokens x longest phrase` regardless of lexicon size.
///
/// Within a category matches are leftmost-longest and non-overlapping: at
/// each position the longest key of that category starting there is taken
/// and the category resumes scanning after it. Categories never block each
/// other.
#[derive(Debug, Clone)]
pub struct Matcher {
    vocab: HashMap<String, u32>,
    nodes: Vec<Node>,
    entry_category: Vec<usize>,
    entry_len: Vec<usize>,
    n_categories: usize,
}

impl Matcher {
    pub fn new(lex: &Lexicon) -> Self {
        let mut vocab: HashMap<String, u32> = HashMap::new();
        let mut nodes = vec![Node::default()];
        let mut entry_category = Vec::with_capacity(lex.len());
        let mut entry_len = Vec::with_capacity(lex.len());
        let cat_index: HashMap<&str, usize> = lex
            .categories()
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();

        for (entry_id, entry) in lex.entries().iter().enumerate() {
            let mut node = 0usize;
            let mut len = 0;
            for part in entry.key.split(' ') {
                let next_id = vocab.len() as u32;
                let token_id = *vocab.entry(part.to_string()).or_insert(next_id);
                node = match nodes[node].children.get(&token_id) {
                    Some(&child) => child as usize,
                    None => {
                        nodes.push(Node::default());
                        let child = nodes.len() - 1;
                        nodes[node].children.insert(token_id, child as u32);
                        child
                    }
                };
                len += 1;
            }
            nodes[node].terminals.push(entry_id as u32);
            entry_category.push(cat_index[entry.category.as_str()]);
            entry_len.push(len);
        }

        Matcher {
            vocab,
            nodes,
            entry_category,
            entry_len,
            n_categories: lex.categories().len(),
        }
    }

    pub fn n_entries(&self) -> usize {
        self.entry_len.len()
    }

    /// Stems tokens and maps them to key-space ids.
    fn token_ids(&self, tokens: &[String]) -> Vec<Option<u32>> {
        tokens
            .iter()
            .map(|t| self.vocab.get(stem(t).as_str()).copied())
            .collect()
    }

    /// Occurrence count per lexicon entry, indexed like `Lexicon::entries`.
    pub fn entry_counts(&self, tokens: &[String]) -> Vec<u32> {
        let ids = self.token_ids(tokens);
        self.entry_counts_for_ids(&ids)
    }

    fn entry_counts_for_ids(&self, ids: &[Option<u32>]) -> Vec<u32> {
        let mut counts = vec![0u32; self.n_entries()];
        let mut next_free = vec![0usize; self.n_categories];
        let mut best: Vec<Option<u32>> = vec![None; self.n_categories];
        let mut touched: Vec<usize> = Vec::new();

        for start in 0..ids.len() {
            let mut node = 0usize;
            for id in &ids[start..] {
                let Some(id) = id else { break };
                let Some(&child) = self.nodes[node].children.get(id) else {
                    break;
                };
                node = child as usize;
                for &entry in &self.nodes[node].terminals {
                    let cat = self.entry_category[entry as usize];
                    if next_free[cat] > start {
                        continue;
                    }
                    if best[cat].is_none() {
                        touched.push(cat);
                    }
                    // deeper nodes are longer keys
                    best[cat] = Some(entry);
                }
            }
            for cat in touched.drain(..) {
                let entry = best[cat].take().expect("touched category has a match") as usize;
                counts[entry] += 1;
                next_free[cat] = start + self.entry_len[entry];
            }
        }
        counts
    }
}
