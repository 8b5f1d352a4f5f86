use serde_json::{Map, Value};

pub const SCHEMA: u64 = 1;

/// What a subcommand produced: a text rendering, the same content as JSON,
/// and the exit code (0 computed, 2 inconclusive).
pub struct Report {
    pub command: &'static str,
    pub text: String,
    pub json: Map<String, Value>,
    pub code: u8,
}

impl Report {
    pub fn new(command: &'static str) -> Report {
        Report {
            command,
            text: String::new(),
            json: Map::new(),
            code: 0,
        }
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.json.insert(key.to_string(), v.into());
    }

    pub fn inconclusive(&mut self) {
        self.code = 2;
    }

    pub fn print(&self, json: bool) {
        if json {
            let mut m = self.json.clone();
            m.insert("schema".into(), SCHEMA.into());
            m.insert("command".into(), self.command.into());
            m.insert("exit".into(), self.code.into());
            println!(
                "{}",
                serde_json::to_string_pretty(&Value::Object(m)).expect("plain data")
            );
        } else {
            print!("{}", self.text);
        }
    }
}
