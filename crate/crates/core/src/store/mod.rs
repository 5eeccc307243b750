//! Embedded, versioned JSON document store.
//!
//! Layout under the root directory:
//!
//! ```text
//! collections/<collection>/<key>.json   head documents
//! objects/<sha256>.json                 content-addressed snapshot bodies
//! revisions/<r>/index.json              collection -> key -> object hash
//! MANIFEST.json                         revision ids and collection listings
//! LOCK                                  present while a writer is active
//! ```
//!
//! Collection and key names are percent-encoded into file names. Every file
//! is written to a temporary name and renamed into place, so a document
//! either appears completely or not at all.

mod documents;

pub use documents::*;

use std::collections::BTreeMap;
use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value as Json};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

const TMP_SUFFIX: &str = ".tmp";

/// One stored document. Its logical collection and key are kept inside the
/// file next to the body.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub collection: String,
    pub key: String,
    pub body: Json,
}

impl Document {
    pub fn new(collection: impl Into<String>, key: impl Into<String>, body: Json) -> Self {
        Document {
            collection: collection.into(),
            key: key.into(),
            body,
        }
    }

    /// Canonical file contents: sorted keys, no insignificant whitespace,
    /// trailing newline.
    pub fn to_bytes(&self) -> Vec<u8> {
        let envelope = json!({
            "body": self.body,
            "collection": self.collection,
            "key": self.key,
        });
        let mut out = canonical_json(&envelope).into_bytes();
        out.push(b'\n');
        out
    }

    fn from_bytes(bytes: &[u8]) -> Result<Document> {
        let mut v: Json = serde_json::from_slice(bytes)?;
        let field = |v: &Json, name: &str| {
            v.get(name)
                .and_then(Json::as_str)
                .map(str::to_string)
                .ok_or_else(|| Error::data(format!("stored document lacks '{name}'")))
        };
        Ok(Document {
            collection: field(&v, "collection")?,
            key: field(&v, "key")?,
            body: v.get_mut("body").map(Json::take).unwrap_or(Json::Null),
        })
    }
}

/// Compact JSON with object keys in sorted order.
pub fn canonical_json(value: &Json) -> String {
    // serde_json's default map is ordered by key
    serde_json::to_string(value).expect("JSON values always serialize")
}

/// What a put did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PutOutcome {
    Created,
    Unchanged,
    Replaced,
}

/// Percent-encodes characters that are unsafe in file names.
pub fn encode_name(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for (i, ch) in name.char_indices() {
        let unsafe_char = matches!(ch, '/' | '\\' | '%') || ch.is_control() || (i == 0 && ch == '.');
        if unsafe_char {
            let mut buf = [0u8; 4];
            for b in ch.encode_utf8(&mut buf).bytes() {
                out.push_str(&format!("%{b:02X}"));
            }
        } else {
            out.push(ch);
        }
    }
    out
}

pub fn decode_name(encoded: &str) -> Result<String> {
    let bytes = encoded.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = encoded
                .get(i + 1..i + 3)
                .and_then(|h| u8::from_str_radix(h, 16).ok())
                .ok_or_else(|| Error::data(format!("bad encoded name '{encoded}'")))?;
            out.push(hex);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).map_err(|_| Error::data(format!("bad encoded name '{encoded}'")))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!("json{TMP_SUFFIX}"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Exclusive writer lock, released on drop.
struct WriteLock {
    path: PathBuf,
}

fn process_alive(pid: u32) -> bool {
    Path::new(&format!("/proc/{pid}")).exists()
}

impl WriteLock {
    fn acquire(root: &Path) -> Result<WriteLock> {
        let path = root.join("LOCK");
        for _ in 0..2 {
            match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(mut f) => {
                    write!(f, "{}", std::process::id())?;
                    return Ok(WriteLock { path });
                }
                Err(e) if e.kind() == ErrorKind::AlreadyExists => {
                    let holder = fs::read_to_string(&path).ok().and_then(|s| s.trim().parse::<u32>().ok());
                    match holder {
                        // a lock left behind by a process that no longer exists
                        Some(pid) if cfg!(target_os = "linux") && !process_alive(pid) => {
                            let _ = fs::remove_file(&path);
                        }
                        _ => return Err(Error::Locked(root.to_path_buf())),
                    }
                }
                Err(e) => return Err(e.into()),
            }
        }
        Err(Error::Locked(root.to_path_buf()))
    }
}

impl Drop for WriteLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// Handle on a store root. Cheap to clone; holds no open files.
#[derive(Debug, Clone)]
pub struct Store {
    root: PathBuf,
}

impl Store {
    /// Opens (creating if needed) the store at `root` and discards any
    /// half-written temporary files left by an interrupted writer.
    pub fn open(root: impl AsRef<Path>) -> Result<Store> {
        let root = root.as_ref().to_path_buf();
        for dir in ["collections", "objects", "revisions"] {
            fs::create_dir_all(root.join(dir))?;
        }
        let store = Store { root };
        if let Ok(_lock) = WriteLock::acquire(&store.root) {
            store.remove_temporaries()?;
        }
        Ok(store)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn remove_temporaries(&self) -> Result<()> {
        for top in ["collections", "objects", "revisions"] {
            for entry in fs::read_dir(self.root.join(top))? {
                let path = entry?.path();
                if path.to_string_lossy().ends_with(TMP_SUFFIX) {
                    if path.is_dir() {
                        fs::remove_dir_all(&path)?;
                    } else {
                        fs::remove_file(&path)?;
                    }
                } else if path.is_dir() && top == "collections" {
                    for inner in fs::read_dir(&path)? {
                        let p = inner?.path();
                        if p.to_string_lossy().ends_with(TMP_SUFFIX) {
                            fs::remove_file(p)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn collection_dir(&self, collection: &str) -> PathBuf {
        self.root.join("collections").join(encode_name(collection))
    }

    fn document_path(&self, collection: &str, key: &str) -> PathBuf {
        self.collection_dir(collection).join(format!("{}.json", encode_name(key)))
    }

    pub fn get(&self, collection: &str, key: &str) -> Result<Option<Document>> {
        match fs::read(self.document_path(collection, key)) {
            Ok(bytes) => Ok(Some(Document::from_bytes(&bytes)?)),
            Err(e) if e.kind() == ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    /// Collection names at head, sorted.
    pub fn collections(&self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for entry in fs::read_dir(self.root.join("collections"))? {
            let entry = entry?;
            if entry.file_type()?.is_dir() {
                out.push(decode_name(&entry.file_name().to_string_lossy())?);
            }
        }
        out.sort();
        Ok(out)
    }

    /// Keys of a collection at head, sorted. Unknown collections are empty.
    pub fn keys(&self, collection: &str) -> Result<Vec<String>> {
        let dir = self.collection_dir(collection);
        let entries = match fs::read_dir(&dir) {
            Ok(e) => e,
            Err(e) if e.kind() == ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        let mut out = Vec::new();
        for entry in entries {
            let name = entry?.file_name().to_string_lossy().into_owned();
            if let Some(stem) = name.strip_suffix(".json") {
                out.push(decode_name(stem)?);
            }
        }
        out.sort();
        Ok(out)
    }

    /// Stores one document. An identical existing document is left alone;
    /// a different one is a conflict unless `force` is set.
    pub fn put(&self, doc: &Document, force: bool) -> Result<PutOutcome> {
        Ok(self.put_batch(std::slice::from_ref(doc), force)?[0])
    }

    /// Stores several documents under one lock. Conflicts are checked for the
    /// whole batch before anything is written.
    pub fn put_batch(&self, docs: &[Document], force: bool) -> Result<Vec<PutOutcome>> {
        let _lock = WriteLock::acquire(&self.root)?;
        let mut pending: BTreeMap<(String, String), Vec<u8>> = BTreeMap::new();
        let mut outcomes = Vec::with_capacity(docs.len());
        for doc in docs {
            let bytes = doc.to_bytes();
            let id = (doc.collection.clone(), doc.key.clone());
            let existing = match pending.get(&id) {
                Some(b) => Some(b.clone()),
                None => match fs::read(self.document_path(&doc.collection, &doc.key)) {
                    Ok(b) => Some(b),
                    Err(e) if e.kind() == ErrorKind::NotFound => None,
                    Err(e) => return Err(e.into()),
                },
            };
            let outcome = match existing {
                None => PutOutcome::Created,
                Some(b) if b == bytes => PutOutcome::Unchanged,
                Some(_) if force => PutOutcome::Replaced,
                Some(_) => {
                    return Err(Error::Conflict(format!(
                        "conflicting document '{}' in collection '{}' (use --force to replace)",
                        doc.key, doc.collection
                    )))
                }
            };
            if outcome != PutOutcome::Unchanged {
                pending.insert(id, bytes);
            }
            outcomes.push(outcome);
        }
        if pending.is_empty() {
            return Ok(outcomes);
        }
        for ((collection, key), bytes) in &pending {
            fs::create_dir_all(self.collection_dir(collection))?;
            write_atomic(&self.document_path(collection, key), bytes)?;
        }
        self.write_manifest()?;
        Ok(outcomes)
    }

    /// Leaves a torn temporary file for `doc` without completing the put,
    /// as a writer killed mid-write would.
    #[doc(hidden)]
    pub fn simulate_interrupted_put(&self, doc: &Document) -> Result<()> {
        let _lock = WriteLock::acquire(&self.root)?;
        fs::create_dir_all(self.collection_dir(&doc.collection))?;
        let path = self.document_path(&doc.collection, &doc.key);
        let bytes = doc.to_bytes();
        fs::write(
            path.with_extension(format!("json{TMP_SUFFIX}")),
            &bytes[..bytes.len() / 2],
        )?;
        Ok(())
    }

    /// Revision ids in increasing order.
    pub fn revisions(&self) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        for entry in fs::read_dir(self.root.join("revisions"))? {
            let name = entry?.file_name().to_string_lossy().into_owned();
            if let Ok(r) = name.parse::<u64>() {
                out.push(r);
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Freezes the current head under a new revision id and returns it.
    pub fn snapshot(&self) -> Result<u64> {
        let _lock = WriteLock::acquire(&self.root)?;
        let revision = self.revisions()?.last().map_or(1, |r| r + 1);
        let mut index: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        for collection in self.collections()? {
            let mut keys = BTreeMap::new();
            for key in self.keys(&collection)? {
                let bytes = fs::read(self.document_path(&collection, &key))?;
                let hash = hex::encode(Sha256::digest(&bytes));
                let object = self.root.join("objects").join(format!("{hash}.json"));
                if !object.exists() {
                    write_atomic(&object, &bytes)?;
                }
                keys.insert(key, hash);
            }
            index.insert(collection, keys);
        }
        let body = json!({ "collections": index, "revision": revision });
        let staging = self.root.join("revisions").join(format!("{revision}{TMP_SUFFIX}"));
        fs::create_dir_all(&staging)?;
        let mut bytes = canonical_json(&body).into_bytes();
        bytes.push(b'\n');
        fs::write(staging.join("index.json"), bytes)?;
        fs::rename(&staging, self.root.join("revisions").join(revision.to_string()))?;
        self.write_manifest()?;
        Ok(revision)
    }

    fn revision_index(&self, revision: u64) -> Result<BTreeMap<String, BTreeMap<String, String>>> {
        let path = self.root.join("revisions").join(revision.to_string()).join("index.json");
        let bytes = match fs::read(path) {
            Ok(b) => b,
            Err(e) if e.kind() == ErrorKind::NotFound => {
                return Err(Error::NotFound(format!("revision {revision}")))
            }
            Err(e) => return Err(e.into()),
        };
        let v: Json = serde_json::from_slice(&bytes)?;
        Ok(serde_json::from_value(v["collections"].clone())?)
    }

    fn read_object(&self, hash: &str) -> Result<Document> {
        Document::from_bytes(&fs::read(self.root.join("objects").join(format!("{hash}.json")))?)
    }

    /// The document as it was when `revision` was taken.
    pub fn read_at(&self, revision: u64, collection: &str, key: &str) -> Result<Document> {
        let index = self.revision_index(revision)?;
        let hash = index
            .get(collection)
            .and_then(|c| c.get(key))
            .ok_or_else(|| Error::NotFound(format!("'{key}' in '{collection}' at revision {revision}")))?;
        self.read_object(hash)
    }

    /// Documents whose key starts with `prefix`, sorted by key, at head or
    /// at the given revision. Unknown collections yield nothing.
    pub fn query(&self, collection: &str, prefix: &str, revision: Option<u64>) -> Result<Vec<Document>> {
        match revision {
            None => {
                let mut out = Vec::new();
                for key in self.keys(collection)? {
                    if key.starts_with(prefix) {
                        if let Some(doc) = self.get(collection, &key)? {
                            out.push(doc);
                        }
                    }
                }
                Ok(out)
            }
            Some(r) => {
                let index = self.revision_index(r)?;
                let Some(keys) = index.get(collection) else {
                    return Ok(Vec::new());
                };
                keys.iter()
                    .filter(|(k, _)| k.starts_with(prefix))
                    .map(|(_, hash)| self.read_object(hash))
                    .collect()
            }
        }
    }

    fn write_manifest(&self) -> Result<()> {
        let mut collections = BTreeMap::new();
        for c in self.collections()? {
            collections.insert(c.clone(), self.keys(&c)?);
        }
        let body = json!({ "collections": collections, "revisions": self.revisions()? });
        let mut bytes = canonical_json(&body).into_bytes();
        bytes.push(b'\n');
        write_atomic(&self.root.join("MANIFEST.json"), &bytes)
    }
}
