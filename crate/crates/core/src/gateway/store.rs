use super::{ChatResponse, GatewayError, Usage};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

const SEPARATOR: &str = "\n---\n";

/// One file per fixture key. The file starts with `key: value` metadata
/// lines, then a `---` line, then the response content verbatim.
#[derive(Debug)]
pub struct FixtureStore {
    dir: PathBuf,
    write_lock: Mutex<()>,
}

impl FixtureStore {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf(), write_lock: Mutex::new(()) }
    }

    pub fn create(dir: &Path) -> Result<Self, GatewayError> {
        std::fs::create_dir_all(dir).map_err(|source| GatewayError::Io { path: dir.to_path_buf(), source })?;
        Ok(Self::new(dir))
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(key)
    }

    pub fn load(&self, key: &str) -> Result<Option<ChatResponse>, GatewayError> {
        let path = self.path_for(key);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(source) => return Err(GatewayError::Io { path, source }),
        };
        let (header, content) = text
            .split_once(SEPARATOR)
            .ok_or_else(|| GatewayError::MalformedResponse(format!("fixture {} has no header", path.display())))?;
        let mut model_id = String::new();
        let mut usage = Usage::default();
        for line in header.lines() {
            if let Some((k, v)) = line.split_once(':') {
                let v = v.trim();
                match k.trim() {
                    "model" => model_id = v.to_string(),
                    "prompt_tokens" => usage.prompt_tokens = v.parse().unwrap_or(0),
                    "completion_tokens" => usage.completion_tokens = v.parse().unwrap_or(0),
                    _ => {}
                }
            }
        }
        Ok(Some(ChatResponse { content: content.to_string(), model_id, usage, latency_ms: 0 }))
    }

    pub fn save(&self, key: &str, response: &ChatResponse) -> Result<(), GatewayError> {
        let _guard = self.write_lock.lock().unwrap_or_else(|e| e.into_inner());
        let path = self.path_for(key);
        let text = format!(
            "# replay fixture\nkey: {key}\nmodel: {}\nprompt_tokens: {}\ncompletion_tokens: {}{SEPARATOR}{}",
            response.model_id, response.usage.prompt_tokens, response.usage.completion_tokens, response.content
        );
        std::fs::write(&path, text).map_err(|source| GatewayError::Io { path, source })
    }
}
