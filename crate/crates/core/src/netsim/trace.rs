use std::fmt::Write as _;

use crate::time::SimTime;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRow {
    pub time: SimTime,
    pub event: String,
    /// Rendered cycle, only on membership changes.
    pub hc: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceLog {
    pub header: Vec<(String, String)>,
    pub rows: Vec<TraceRow>,
}

impl TraceLog {
    pub fn push(&mut self, time: SimTime, event: impl Into<String>, hc: Option<String>) {
        self.rows.push(TraceRow {
            time,
            event: event.into(),
            hc,
        });
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str("time\tevent\thc\n");
        for r in &self.rows {
            let _ = writeln!(out, "{}\t{}\t{}", r.time, r.event, r.hc.as_deref().unwrap_or(""));
        }
        out
    }
}

/// A row of a reference trace. `...` in the cycle column stands for any run
/// of ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenRow {
    pub event: String,
    pub hc: Option<String>,
}

pub fn parse_golden(text: &str) -> Vec<GoldenRow> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let mut f = l.split('\t');
            let _time = f.next();
            let event = f.next().unwrap_or("").trim().to_string();
            let hc = f.next().map(str::trim).filter(|s| !s.is_empty()).map(String::from);
            GoldenRow { event, hc }
        })
        .collect()
}

/// Puts the id list of a "do not answer" row in ascending order, so that
/// rows listing the same nodes compare equal.
pub fn normalize_event(event: &str) -> String {
    let e = event.replace(" to the proof of life", " to proof of life");
    let Some(rest) = e.strip_prefix("Nodes ") else {
        return e;
    };
    let Some(idx) = rest.find(" do not answer") else {
        return e;
    };
    let mut ids: Vec<u32> = rest[..idx]
        .split(',')
        .filter_map(|s| s.trim().parse().ok())
        .collect();
    ids.sort_unstable();
    let list: Vec<String> = ids.iter().map(u32::to_string).collect();
    format!("Nodes {}{}", list.join(", "), &rest[idx..])
}

/// Whether `hc` matches `pattern`, where `...` stands for one or more ids.
pub fn hc_matches(pattern: &str, hc: &str) -> bool {
    let want: Vec<&str> = pattern.split(',').map(str::trim).collect();
    let got: Vec<&str> = hc.split(',').map(str::trim).collect();
    fn rec(want: &[&str], got: &[&str]) -> bool {
        match want.split_first() {
            None => got.is_empty(),
            Some((&"...", rest)) => (1..=got.len()).any(|k| rec(rest, &got[k..])),
            Some((w, rest)) => got.first() == Some(w) && rec(rest, &got[1..]),
        }
    }
    rec(&want, &got)
}

/// Finds the golden rows, in order, among the trace rows. Returns the index
/// of the first golden row that could not be matched.
pub fn match_golden(trace: &TraceLog, golden: &[GoldenRow]) -> Result<(), usize> {
    let mut it = trace.rows.iter();
    for (i, g) in golden.iter().enumerate() {
        let want = normalize_event(&g.event);
        let found = it.by_ref().any(|r| {
            normalize_event(&r.event) == want
                && match (&g.hc, &r.hc) {
                    (None, _) => true,
                    (Some(p), Some(h)) => hc_matches(p, h),
                    (Some(_), None) => false,
                }
        });
        if !found {
            return Err(i);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wildcard() {
        assert!(hc_matches("8,...,4,14,2,...,0", "8,3,9,7,4,14,2,6,5,1,10,0"));
        assert!(hc_matches("8,...,6,1,10,0", "8,3,9,7,4,14,2,6,1,10,0"));
        assert!(!hc_matches("8,...,6,1,10,0", "8,3,9,7,4,14,2,6,5,1,10,0"));
        assert!(hc_matches("8,3,9", "8,3,9"));
        assert!(!hc_matches("8,...,9", "8,9"));
    }

    #[test]
    fn answer_lists_normalize() {
        assert_eq!(
            normalize_event("Nodes 3, 1, 0 do not answer to proof of life"),
            "Nodes 0, 1, 3 do not answer to proof of life"
        );
        assert_eq!(
            normalize_event("Nodes 4, 5, 6 do not answer to the proof of life"),
            "Nodes 4, 5, 6 do not answer to proof of life"
        );
    }

    #[test]
    fn subsequence_matching() {
        let mut t = TraceLog::default();
        t.push(SimTime(0), "a", None);
        t.push(SimTime(1), "b", Some("1,2,3".into()));
        t.push(SimTime(2), "c", None);
        let g = parse_golden("0\ta\t\n2\tc\t\n");
        assert_eq!(match_golden(&t, &g), Ok(()));
        let g = parse_golden("2\tc\t\n0\ta\t\n");
        assert_eq!(match_golden(&t, &g), Err(1));
        let g = parse_golden("1\tb\t1,...,3\n");
        assert_eq!(match_golden(&t, &g), Ok(()));
    }
}
