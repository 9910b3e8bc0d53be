//! Append-only event logs of stage constructions, stored as JSON lines.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub stage: u64,
    pub substage: Option<u64>,
    pub step: Option<u8>,
    pub event: String,
    pub payload: Value,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Transcript {
    events: Vec<Event>,
}

impl Transcript {
    pub fn new() -> Self {
        Transcript::default()
    }

    pub fn push(&mut self, stage: u64, substage: Option<u64>, step: Option<u8>, event: &str, payload: Value) {
        self.events.push(Event { stage, substage, step, event: event.to_string(), payload });
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Event> + 'a {
        self.events.iter().filter(move |e| e.event == name)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let events = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .enumerate()
            .map(|(n, l)| serde_json::from_str(l).map_err(|e| Error::BadInput(format!("transcript line {}: {e}", n + 1))))
            .collect::<Result<_>>()?;
        Ok(Transcript { events })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn jsonl_round_trip() {
        let mut t = Transcript::new();
        t.push(0, Some(0), Some(1), "target_defined", json!({"e": 0, "value": 1}));
        t.push(1, None, None, "finalize", json!({"settled_below": 4}));
        let text = t.to_jsonl();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with(r#"{"stage":0,"substage":0,"step":1,"event":"target_defined""#));
        assert_eq!(Transcript::from_jsonl(&text).unwrap(), t);
        assert!(Transcript::from_jsonl("{nope").is_err());
    }
}
