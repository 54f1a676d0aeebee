//! Composition of elementary trees by substitution and adjunction.
//!
//! [`compose`] replays the attachment records produced by extraction. It
//! keeps a forest with one component per not-yet-attached tree and finds
//! targets through node provenance, so the records can be applied in any
//! order and still yield the same derived tree.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::etree::{
    AnchorSpan, Attachment, AttachmentRecord, ElementaryTree, EtNode, Operation, TreeKind,
};
use crate::tables::RuleTables;
use crate::tree::{GornAddress, Label, SyntaxTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("category mismatch: target {target}, tree {tree}")]
    CategoryMismatch { target: String, tree: String },
    #[error("node at {address} is not a substitution site")]
    NotASite { address: GornAddress },
    #[error("no usable node at {address}")]
    BadAddress { address: GornAddress },
    #[error("tree {id} has the wrong kind for this operation")]
    WrongKind { id: usize },
    #[error("two auxiliary trees share rank {rank} at {address} of tree {parent}")]
    DuplicateAdjunction {
        parent: usize,
        address: GornAddress,
        rank: usize,
    },
    #[error("derivation is not a tree: {0}")]
    DisconnectedDerivation(String),
    #[error("derived tree still has an open substitution site or foot")]
    Incomplete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdjoinMode {
    Layered,
    Sister,
}

fn same_category(target: &str, tree: &str) -> Result<(), ComposeError> {
    if target == tree {
        Ok(())
    } else {
        Err(ComposeError::CategoryMismatch {
            target: target.to_string(),
            tree: tree.to_string(),
        })
    }
}

/// Replace the substitution site at `site` with the initial tree `filler`.
pub fn substitute(
    host: &EtNode,
    site: &GornAddress,
    filler: &ElementaryTree,
) -> Result<EtNode, ComposeError> {
    if filler.kind != TreeKind::Alpha {
        return Err(ComposeError::WrongKind { id: filler.id });
    }
    let mut out = host.clone();
    let node = out
        .node_at_mut(site)
        .ok_or_else(|| ComposeError::BadAddress { address: site.clone() })?;
    match node {
        EtNode::Subst { label } => same_category(&label.category, filler.root_category())?,
        _ => return Err(ComposeError::NotASite { address: site.clone() }),
    }
    *node = filler.shape.clone();
    Ok(out)
}

/// Adjoin the auxiliary tree `aux` at the internal node `at`.
pub fn adjoin(
    host: &EtNode,
    at: &GornAddress,
    aux: &ElementaryTree,
    mode: AdjoinMode,
) -> Result<EtNode, ComposeError> {
    if aux.kind != TreeKind::Beta {
        return Err(ComposeError::WrongKind { id: aux.id });
    }
    let foot = aux.foot().ok_or(ComposeError::WrongKind { id: aux.id })?;
    let mut out = host.clone();
    let target = out
        .node_at_mut(at)
        .ok_or_else(|| ComposeError::BadAddress { address: at.clone() })?;
    if !matches!(target, EtNode::Phrase { .. }) {
        return Err(ComposeError::BadAddress { address: at.clone() });
    }
    same_category(target.category(), aux.root_category())?;
    match mode {
        AdjoinMode::Layered => {
            let mut shape = aux.shape.clone();
            let moved = std::mem::replace(
                target,
                EtNode::Subst {
                    label: Label::new(""),
                },
            );
            *shape.node_at_mut(&foot).expect("foot exists") = moved;
            *target = shape;
        }
        AdjoinMode::Sister => {
            if foot.0.len() != 1 {
                return Err(ComposeError::WrongKind { id: aux.id });
            }
            let foot_pos = foot.0[0];
            let spliced: Vec<EtNode> = aux
                .shape
                .children()
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != foot_pos)
                .map(|(_, c)| c.clone())
                .collect();
            if let EtNode::Phrase { children, .. } = target {
                if foot_pos == aux.shape.children().len() - 1 {
                    children.splice(0..0, spliced);
                } else {
                    children.extend(spliced);
                }
            }
        }
    }
    Ok(out)
}

/// Derivation history: which tree attached where, by which operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationTree {
    pub nodes: BTreeMap<usize, ElementaryTree>,
    pub edges: Vec<AttachmentRecord>,
    pub root: usize,
}

impl DerivationTree {
    /// Check that the records form a tree over the given elementary trees.
    pub fn new(
        etrees: &[ElementaryTree],
        records: &[AttachmentRecord],
    ) -> Result<DerivationTree, ComposeError> {
        let disconnected = |m: String| ComposeError::DisconnectedDerivation(m);
        let mut nodes = BTreeMap::new();
        for et in etrees {
            if nodes.insert(et.id, et.clone()).is_some() {
                return Err(disconnected(format!("duplicate tree id {}", et.id)));
            }
        }
        let mut parent_of: BTreeMap<usize, usize> = BTreeMap::new();
        for r in records {
            if !nodes.contains_key(&r.child) || !nodes.contains_key(&r.parent) {
                return Err(disconnected(format!("record {} -> {} names an unknown tree", r.child, r.parent)));
            }
            if parent_of.insert(r.child, r.parent).is_some() {
                return Err(disconnected(format!("tree {} has several parents", r.child)));
            }
        }
        let roots: Vec<usize> = nodes.keys().filter(|k| !parent_of.contains_key(k)).copied().collect();
        if roots.len() != 1 {
            return Err(disconnected(format!("{} parentless trees", roots.len())));
        }
        let root = roots[0];
        if nodes[&root].kind != TreeKind::Alpha {
            return Err(disconnected(format!("root tree {} is auxiliary", root)));
        }
        for &start in nodes.keys() {
            let mut cur = start;
            let mut steps = 0;
            while let Some(&p) = parent_of.get(&cur) {
                cur = p;
                steps += 1;
                if steps > nodes.len() {
                    return Err(disconnected(format!("cycle through tree {}", start)));
                }
            }
        }
        Ok(DerivationTree {
            nodes,
            edges: records.to_vec(),
            root,
        })
    }

    pub fn parent_of(&self, id: usize) -> Option<usize> {
        self.edges.iter().find(|e| e.child == id).map(|e| e.parent)
    }

    pub fn count(&self, op: Operation) -> usize {
        self.edges.iter().filter(|e| e.op() == op).count()
    }

    /// Indented text rendering, one line per tree:
    /// `token ←op@address— parent`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        self.dump_node(self.root, 0, None, &mut out);
        out
    }

    fn token(&self, id: usize) -> String {
        fn first(n: &EtNode, id: usize) -> Option<String> {
            match n {
                EtNode::Anchor { token, index, .. } if *index == id => Some(token.clone()),
                _ => n.children().iter().find_map(|c| first(c, id)),
            }
        }
        first(&self.nodes[&id].shape, id).unwrap_or_default()
    }

    fn dump_node(&self, id: usize, depth: usize, via: Option<&AttachmentRecord>, out: &mut String) {
        let indent = "  ".repeat(depth);
        match via {
            None => {
                let _ = writeln!(out, "{}{}#{}", indent, self.token(id), id);
            }
            Some(r) => {
                let op = match r.attachment {
                    Attachment::Substitution => "subst".to_string(),
                    Attachment::Layered { rank } => format!("adjoin[{}]", rank),
                    Attachment::Sister { gap } => format!("sister[{}]", gap),
                };
                let _ = writeln!(
                    out,
                    "{}{}#{} ←{}@{}— {}#{}",
                    indent,
                    self.token(id),
                    id,
                    op,
                    r.address,
                    self.token(r.parent),
                    r.parent
                );
            }
        }
        let mut kids: Vec<&AttachmentRecord> = self.edges.iter().filter(|e| e.parent == id).collect();
        kids.sort_by_key(|e| e.child);
        for e in kids {
            self.dump_node(e.child, depth + 1, Some(e), out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum DKind {
    Phrase(Label),
    Anchor { pos: String, token: String, index: usize },
    Site(Label),
    Foot(Label),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Slot {
    owner: usize,
    address: GornAddress,
    rank: usize,
}

/// Node of the tree under construction, annotated with the elementary
/// node it came from and its ordering key among siblings.
#[derive(Debug, Clone, PartialEq, Eq)]
struct DNode {
    kind: DKind,
    children: Vec<DNode>,
    prov: Option<(usize, GornAddress)>,
    key: (usize, usize),
    layer: Option<Slot>,
}

impl DNode {
    fn instantiate(et: &ElementaryTree) -> DNode {
        fn go(n: &EtNode, id: usize, at: GornAddress, key: (usize, usize)) -> DNode {
            let (kind, children) = match n {
                EtNode::Phrase { label, children } => (
                    DKind::Phrase(label.clone()),
                    children
                        .iter()
                        .enumerate()
                        .map(|(j, c)| go(c, id, at.child(j), (2 * j + 1, 0)))
                        .collect(),
                ),
                EtNode::Anchor { pos, token, index } => (
                    DKind::Anchor {
                        pos: pos.clone(),
                        token: token.clone(),
                        index: *index,
                    },
                    Vec::new(),
                ),
                EtNode::Subst { label } => (DKind::Site(label.clone()), Vec::new()),
                EtNode::Foot { label } => (DKind::Foot(label.clone()), Vec::new()),
            };
            DNode {
                kind,
                children,
                prov: Some((id, at)),
                key,
                layer: None,
            }
        }
        go(&et.shape, et.id, GornAddress::root(), (1, 0))
    }

    fn category(&self) -> &str {
        match &self.kind {
            DKind::Phrase(l) | DKind::Site(l) | DKind::Foot(l) => &l.category,
            DKind::Anchor { pos, .. } => pos,
        }
    }

    fn find(&self, pred: &dyn Fn(&DNode) -> bool) -> Option<Vec<usize>> {
        if pred(self) {
            return Some(Vec::new());
        }
        for (i, c) in self.children.iter().enumerate() {
            if let Some(mut p) = c.find(pred) {
                p.insert(0, i);
                return Some(p);
            }
        }
        None
    }

    fn at(&self, path: &[usize]) -> &DNode {
        path.iter().fold(self, |n, &i| &n.children[i])
    }

    fn at_mut(&mut self, path: &[usize]) -> &mut DNode {
        path.iter().fold(self, |n, &i| &mut n.children[i])
    }

    fn to_syntax_tree(&self) -> Option<SyntaxTree> {
        match &self.kind {
            DKind::Phrase(label) => Some(SyntaxTree::phrase(
                label.clone(),
                self.children.iter().map(|c| c.to_syntax_tree()).collect::<Option<Vec<_>>>()?,
            )),
            DKind::Anchor { pos, token, index } => Some(SyntaxTree::leaf(pos.clone(), token.clone(), *index)),
            DKind::Site(_) | DKind::Foot(_) => None,
        }
    }

    fn to_etnode(&self) -> EtNode {
        match &self.kind {
            DKind::Phrase(label) => EtNode::Phrase {
                label: label.clone(),
                children: self.children.iter().map(|c| c.to_etnode()).collect(),
            },
            DKind::Anchor { pos, token, index } => EtNode::Anchor {
                pos: pos.clone(),
                token: token.clone(),
                index: *index,
            },
            DKind::Site(label) => EtNode::Subst { label: label.clone() },
            DKind::Foot(label) => EtNode::Foot { label: label.clone() },
        }
    }
}

/// Trees not yet attached to a parent, keyed by the id of their root tree.
struct Forest<'a> {
    trees: &'a BTreeMap<usize, ElementaryTree>,
    components: BTreeMap<usize, DNode>,
}

impl<'a> Forest<'a> {
    fn new(trees: &'a BTreeMap<usize, ElementaryTree>) -> Self {
        let components = trees.iter().map(|(&id, et)| (id, DNode::instantiate(et))).collect();
        Forest { trees, components }
    }

    fn locate(&self, owner: usize, address: &GornAddress) -> Option<(usize, Vec<usize>)> {
        let want = Some((owner, address.clone()));
        self.components
            .iter()
            .find_map(|(&cid, root)| root.find(&|n| n.prov == want).map(|p| (cid, p)))
    }

    fn apply(&mut self, rec: &AttachmentRecord) -> Result<(), ComposeError> {
        let child_tree = &self.trees[&rec.child];
        let mut comp = self.components.remove(&rec.child).ok_or_else(|| {
            ComposeError::DisconnectedDerivation(format!("tree {} attached twice", rec.child))
        })?;
        let (cid, mut path) = match self.locate(rec.parent, &rec.address) {
            Some(found) => found,
            None => {
                self.components.insert(rec.child, comp);
                return Err(ComposeError::BadAddress {
                    address: rec.address.clone(),
                });
            }
        };
        let result = (|| {
            let host = self.components.get_mut(&cid).expect("component exists");
            match rec.attachment {
                Attachment::Substitution => {
                    if child_tree.kind != TreeKind::Alpha {
                        return Err(ComposeError::WrongKind { id: rec.child });
                    }
                    let target = host.at_mut(&path);
                    match &target.kind {
                        DKind::Site(l) => same_category(&l.category, child_tree.root_category())?,
                        _ => {
                            return Err(ComposeError::NotASite {
                                address: rec.address.clone(),
                            })
                        }
                    }
                    comp.key = target.key;
                    *target = comp.clone();
                }
                Attachment::Layered { rank } => {
                    if child_tree.kind != TreeKind::Beta {
                        return Err(ComposeError::WrongKind { id: rec.child });
                    }
                    {
                        let target = host.at(&path);
                        if !matches!(target.kind, DKind::Phrase(_) | DKind::Anchor { .. }) {
                            return Err(ComposeError::BadAddress {
                                address: rec.address.clone(),
                            });
                        }
                        same_category(target.category(), child_tree.root_category())?;
                    }
                    while let Some((_, up)) = path.split_last() {
                        let parent = host.at(up);
                        match &parent.layer {
                            Some(s) if s.owner == rec.parent && s.address == rec.address => {
                                if s.rank < rank {
                                    path = up.to_vec();
                                } else if s.rank == rank {
                                    return Err(ComposeError::DuplicateAdjunction {
                                        parent: rec.parent,
                                        address: rec.address.clone(),
                                        rank,
                                    });
                                } else {
                                    break;
                                }
                            }
                            _ => break,
                        }
                    }
                    let target = host.at_mut(&path);
                    let foot_path = comp
                        .find(&|n| matches!(n.kind, DKind::Foot(_)) && n.prov.as_ref().map(|p| p.0) == Some(rec.child))
                        .ok_or(ComposeError::WrongKind { id: rec.child })?;
                    let moved = target.clone();
                    let mut wrapped = comp.clone();
                    let foot = wrapped.at_mut(&foot_path);
                    let foot_key = foot.key;
                    *foot = moved;
                    foot.key = foot_key;
                    wrapped.key = target.key;
                    wrapped.layer = Some(Slot {
                        owner: rec.parent,
                        address: rec.address.clone(),
                        rank,
                    });
                    *target = wrapped;
                }
                Attachment::Sister { gap } => {
                    if child_tree.kind != TreeKind::Beta {
                        return Err(ComposeError::WrongKind { id: rec.child });
                    }
                    let target = host.at_mut(&path);
                    if !matches!(target.kind, DKind::Phrase(_)) {
                        return Err(ComposeError::BadAddress {
                            address: rec.address.clone(),
                        });
                    }
                    same_category(target.category(), child_tree.root_category())?;
                    let spliced: Vec<DNode> = comp
                        .children
                        .iter()
                        .filter(|c| !matches!(c.kind, DKind::Foot(_)))
                        .cloned()
                        .map(|mut c| {
                            c.key = (2 * gap, rec.child);
                            c
                        })
                        .collect();
                    target.children.extend(spliced);
                    target.children.sort_by_key(|c| c.key);
                }
            }
            Ok(())
        })();
        if result.is_err() {
            self.components.insert(rec.child, comp);
        }
        result
    }
}

/// The oracle's application order: substitutions bottom-up, then
/// adjunctions from the innermost target outward; ties by anchor.
pub fn oracle_order(records: &[AttachmentRecord], etrees: &BTreeMap<usize, ElementaryTree>) -> Vec<usize> {
    let size = |id: usize| etrees.get(&id).map(|e| e.shape.anchors().len()).unwrap_or(0);
    let mut idx: Vec<usize> = (0..records.len()).collect();
    idx.sort_by_key(|&i| {
        let r = &records[i];
        match r.attachment {
            Attachment::Substitution => (0, size(r.child), 0, r.child),
            Attachment::Layered { rank } => (1, rank, r.address.0.len(), r.child),
            Attachment::Sister { .. } => (1, 0, r.address.0.len(), r.child),
        }
    });
    idx
}

/// Apply the records in the given order (indices into `records`).
pub fn compose_in_order(
    derivation: &DerivationTree,
    order: &[usize],
) -> Result<SyntaxTree, ComposeError> {
    let mut forest = Forest::new(&derivation.nodes);
    for &i in order {
        forest.apply(&derivation.edges[i])?;
    }
    if forest.components.len() != 1 {
        return Err(ComposeError::DisconnectedDerivation(format!(
            "{} unattached components remain",
            forest.components.len()
        )));
    }
    let (_, root) = forest.components.into_iter().next().unwrap();
    root.to_syntax_tree().ok_or(ComposeError::Incomplete)
}

/// Build the derivation tree and replay it into the derived tree.
pub fn compose(
    etrees: &[ElementaryTree],
    records: &[AttachmentRecord],
) -> Result<(DerivationTree, SyntaxTree), ComposeError> {
    let derivation = DerivationTree::new(etrees, records)?;
    let order = oracle_order(&derivation.edges, &derivation.nodes);
    let derived = compose_in_order(&derivation, &order)?;
    Ok((derivation, derived))
}

/// Head index per token (0 for the root), read off the derivation.
///
/// Punctuation that anchors a leaf auxiliary tree takes the nearest
/// preceding non-punctuation token as head (the next one when nothing
/// precedes it); sentence-final punctuation depends on the root.
pub fn heads_from_derivation(d: &DerivationTree, tables: &RuleTables) -> Vec<usize> {
    let ids: Vec<usize> = d.nodes.keys().copied().collect();
    let n = ids.iter().copied().max().unwrap_or(0);
    let is_punct = |id: usize| {
        d.nodes
            .get(&id)
            .map(|e| tables.is_punct_pos(e.anchor_pos()))
            .unwrap_or(false)
    };
    let has_children = |id: usize| d.edges.iter().any(|e| e.parent == id);
    let mut heads = vec![0; n];
    for &id in &ids {
        let structural = d.parent_of(id).unwrap_or(0);
        let conventional = if id != d.root
            && is_punct(id)
            && d.nodes[&id].kind == TreeKind::Beta
            && !has_children(id)
        {
            if id == n {
                Some(d.root)
            } else {
                (1..id)
                    .rev()
                    .find(|&j| d.nodes.contains_key(&j) && !is_punct(j))
                    .or_else(|| (id + 1..=n).find(|&j| d.nodes.contains_key(&j) && !is_punct(j)))
            }
        } else {
            None
        };
        heads[id - 1] = conventional.unwrap_or(structural);
    }
    heads
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MergeError {
    #[error("span {0}-{1} is outside the sentence")]
    OutOfRange(usize, usize),
    #[error("span {0}-{1} is not a connected unit of the derivation")]
    NotAUnit(usize, usize),
    #[error(transparent)]
    Compose(#[from] ComposeError),
}

/// Merge the trees anchored inside `lo..=hi` into one multi-anchor tree.
pub fn merge_span(
    derivation: &DerivationTree,
    lo: usize,
    hi: usize,
) -> Result<ElementaryTree, MergeError> {
    if lo >= hi || !derivation.nodes.contains_key(&lo) || !derivation.nodes.contains_key(&hi) {
        return Err(MergeError::OutOfRange(lo, hi));
    }
    let inside = |id: usize| (lo..=hi).contains(&id);
    let heads: Vec<usize> = (lo..=hi)
        .filter(|&id| derivation.parent_of(id).is_none_or(|p| !inside(p)))
        .collect();
    if heads.len() != 1 {
        return Err(MergeError::NotAUnit(lo, hi));
    }
    let head = heads[0];
    let members: BTreeMap<usize, ElementaryTree> = derivation
        .nodes
        .iter()
        .filter(|(id, _)| inside(**id))
        .map(|(id, et)| (*id, et.clone()))
        .collect();
    let internal: Vec<AttachmentRecord> = derivation
        .edges
        .iter()
        .filter(|e| inside(e.child) && inside(e.parent))
        .cloned()
        .collect();
    let order = oracle_order(&internal, &members);
    let mut forest = Forest::new(&members);
    for i in order {
        forest.apply(&internal[i])?;
    }
    let root = forest.components.remove(&head).ok_or(MergeError::NotAUnit(lo, hi))?;
    if !forest.components.is_empty() {
        return Err(MergeError::NotAUnit(lo, hi));
    }
    Ok(ElementaryTree {
        id: lo,
        kind: derivation.nodes[&head].kind,
        shape: root.to_etnode(),
        anchor: AnchorSpan::Span(lo, hi),
        name: None,
    })
}
