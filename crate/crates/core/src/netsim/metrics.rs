use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::protocol::Category;

/// Byte and message counts per traffic category.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Metrics {
    pub bytes: BTreeMap<Category, u64>,
    pub messages: BTreeMap<Category, u64>,
    pub events: BTreeMap<String, u64>,
    pub insertion_latencies_ms: Vec<u64>,
}

impl Metrics {
    pub fn record(&mut self, category: Category, bytes: usize, copies: usize) {
        *self.bytes.entry(category).or_default() += (bytes * copies) as u64;
        *self.messages.entry(category).or_default() += copies as u64;
    }

    /// Adds a batch of `messages` messages totalling `bytes`.
    pub fn add(&mut self, category: Category, bytes: usize, messages: usize) {
        *self.bytes.entry(category).or_default() += bytes as u64;
        *self.messages.entry(category).or_default() += messages as u64;
    }

    pub fn count_event(&mut self, name: &str) {
        *self.events.entry(name.to_string()).or_default() += 1;
    }

    pub fn bytes_of(&self, c: Category) -> u64 {
        self.bytes.get(&c).copied().unwrap_or(0)
    }

    pub fn total_bytes(&self) -> u64 {
        self.bytes.values().sum()
    }

    /// Share of `c` in the total, zero when nothing was sent.
    pub fn share(&self, c: Category) -> f64 {
        let total = self.total_bytes();
        if total == 0 {
            0.0
        } else {
            self.bytes_of(c) as f64 / total as f64
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("category,bytes,count\n");
        for c in Category::ALL {
            let _ = writeln!(
                out,
                "{},{},{}",
                c.name(),
                self.bytes_of(c),
                self.messages.get(&c).copied().unwrap_or(0)
            );
        }
        let _ = writeln!(
            out,
            "total,{},{}",
            self.total_bytes(),
            self.messages.values().sum::<u64>()
        );
        out
    }

    pub fn events_csv(&self) -> String {
        let mut out = String::from("event,count\n");
        for (k, v) in &self.events {
            let _ = writeln!(out, "{k},{v}");
        }
        let n = self.insertion_latencies_ms.len() as u64;
        let mean = self
            .insertion_latencies_ms
            .iter()
            .sum::<u64>()
            .checked_div(n)
            .unwrap_or(0);
        let _ = writeln!(out, "insertion_latency_ms_mean,{mean}");
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShareSummary {
    pub rows: Vec<(String, u64, f64)>,
    pub total: u64,
    pub zkp_below_10: bool,
    pub pol_in_band: bool,
}

/// Parses a metrics CSV and computes category shares.
pub fn summarize_csv(text: &str) -> Result<ShareSummary, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == "category,bytes,count" => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    let mut rows = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(format!("malformed row {line:?}"));
        }
        let bytes: u64 = fields[1]
            .trim()
            .parse()
            .map_err(|_| format!("bad byte count in {line:?}"))?;
        fields[2]
            .trim()
            .parse::<u64>()
            .map_err(|_| format!("bad message count in {line:?}"))?;
        if fields[0] != "total" {
            rows.push((fields[0].to_string(), bytes));
        }
    }
    let total: u64 = rows.iter().map(|r| r.1).sum();
    let share = |name: &str| {
        rows.iter()
            .find(|r| r.0 == name)
            .map_or(0.0, |r| if total == 0 { 0.0 } else { r.1 as f64 / total as f64 })
    };
    let zkp = share("zkp");
    let pol = share("proof_of_life");
    Ok(ShareSummary {
        zkp_below_10: total > 0 && zkp < 0.10,
        pol_in_band: total > 0 && (0.80..=0.95).contains(&pol),
        rows: rows
            .iter()
            .map(|(n, b)| (n.clone(), *b, if total == 0 { 0.0 } else { *b as f64 / total as f64 }))
            .collect(),
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totals_add_up() {
        let mut m = Metrics::default();
        m.record(Category::Zkp, 10, 3);
        m.record(Category::ProofOfLife, 13, 2);
        assert_eq!(m.total_bytes(), 56);
        let s = summarize_csv(&m.to_csv()).unwrap();
        assert_eq!(s.total, 56);
        assert!(!s.pol_in_band);
    }

    #[test]
    fn empty_has_no_flags() {
        let s = summarize_csv(&Metrics::default().to_csv()).unwrap();
        assert_eq!(s.total, 0);
        assert!(!s.zkp_below_10 && !s.pol_in_band);
        assert!(s.rows.iter().all(|r| r.2 == 0.0));
    }

    #[test]
    fn rejects_garbage() {
        assert!(summarize_csv("hello").is_err());
        assert!(summarize_csv("category,bytes,count\nzkp,x,1\n").is_err());
    }
}
