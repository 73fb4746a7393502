use serde::{Deserialize, Serialize};

use moonshine::distrib::render_columns;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// A rectangular result plus command-specific metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default)]
    pub data: serde_json::Value,
}

impl Report {
    pub fn new(command: &str, header: Vec<String>) -> Self {
        Report { command: command.into(), header, rows: Vec::new(), notes: Vec::new(), data: serde_json::Value::Null }
    }

    /// Cell in the row whose first column is `key`.
    pub fn cell(&self, key: &str, column: &str) -> Option<&str> {
        let c = self.header.iter().position(|h| h == column)?;
        self.rows.iter().find(|r| r[0] == key).map(|r| r[c].as_str())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("serializable") + "\n",
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).expect("in-memory write");
                for r in &self.rows {
                    w.write_record(r).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
            }
            Format::Text => {
                let mut all = vec![self.header.clone()];
                all.extend(self.rows.iter().cloned());
                let mut out = render_columns(&all);
                for n in &self.notes {
                    out.push_str(&format!("# {n}\n"));
                }
                out
            }
        }
    }
}
