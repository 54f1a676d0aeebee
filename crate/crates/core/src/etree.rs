//! Elementary trees and their extraction from a normalized tree.
//!
//! Every phrase node of the normalized tree is owned by exactly one
//! elementary tree. Adjunction layers `(X core mod)` belong to the
//! auxiliary tree of the modifier's head word, with a foot in place of the
//! core; every other phrase belongs to the tree of its lexical head.
//! Argument children are cut off as substitution sites, and modifiers that
//! sit flat among their siblings become sister-adjoined auxiliary trees.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::normalize::{head_index, layer_core};
use crate::tables::{Role, RuleTables};
use crate::tree::{GornAddress, Label, SyntaxTree};

/// Placeholder for the anchor word in de-lexicalized templates.
pub const ANCHOR_MARK: &str = "◇";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeKind {
    Alpha,
    Beta,
}

impl TreeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TreeKind::Alpha => "alpha",
            TreeKind::Beta => "beta",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            TreeKind::Alpha => "α",
            TreeKind::Beta => "β",
        }
    }
}

/// Node of an elementary (or partially derived) tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EtNode {
    Phrase { label: Label, children: Vec<EtNode> },
    Anchor { pos: String, token: String, index: usize },
    /// Substitution site, rendered `NP↓`.
    Subst { label: Label },
    /// Foot of an auxiliary tree, rendered `NP*`.
    Foot { label: Label },
}

impl EtNode {
    pub fn category(&self) -> &str {
        match self {
            EtNode::Phrase { label, .. } | EtNode::Subst { label } | EtNode::Foot { label } => {
                &label.category
            }
            EtNode::Anchor { pos, .. } => pos,
        }
    }

    pub fn children(&self) -> &[EtNode] {
        match self {
            EtNode::Phrase { children, .. } => children,
            _ => &[],
        }
    }

    pub fn node_at(&self, addr: &GornAddress) -> Option<&EtNode> {
        let mut cur = self;
        for &i in &addr.0 {
            cur = cur.children().get(i)?;
        }
        Some(cur)
    }

    pub fn node_at_mut(&mut self, addr: &GornAddress) -> Option<&mut EtNode> {
        let mut cur = self;
        for &i in &addr.0 {
            cur = match cur {
                EtNode::Phrase { children, .. } => children.get_mut(i)?,
                _ => return None,
            };
        }
        Some(cur)
    }

    /// Addresses of every node matching `pred`, in preorder.
    pub fn find_all(&self, pred: &dyn Fn(&EtNode) -> bool) -> Vec<GornAddress> {
        fn go(n: &EtNode, at: GornAddress, pred: &dyn Fn(&EtNode) -> bool, out: &mut Vec<GornAddress>) {
            if pred(n) {
                out.push(at.clone());
            }
            for (i, c) in n.children().iter().enumerate() {
                go(c, at.child(i), pred, out);
            }
        }
        let mut out = Vec::new();
        go(self, GornAddress::root(), pred, &mut out);
        out
    }

    pub fn anchors(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit(&mut |n| {
            if let EtNode::Anchor { index, .. } = n {
                out.push(*index);
            }
        });
        out
    }

    fn visit(&self, f: &mut dyn FnMut(&EtNode)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Convert a tree without open sites or feet.
    pub fn to_syntax_tree(&self) -> Option<SyntaxTree> {
        match self {
            EtNode::Phrase { label, children } => Some(SyntaxTree::phrase(
                label.clone(),
                children.iter().map(|c| c.to_syntax_tree()).collect::<Option<Vec<_>>>()?,
            )),
            EtNode::Anchor { pos, token, index } => Some(SyntaxTree::leaf(pos.clone(), token.clone(), *index)),
            EtNode::Subst { .. } | EtNode::Foot { .. } => None,
        }
    }

    pub fn from_syntax_tree(t: &SyntaxTree) -> EtNode {
        match t {
            SyntaxTree::Phrase { label, children } => EtNode::Phrase {
                label: label.clone(),
                children: children.iter().map(EtNode::from_syntax_tree).collect(),
            },
            SyntaxTree::PreTerminal { pos, token, index } => EtNode::Anchor {
                pos: pos.clone(),
                token: token.clone(),
                index: *index,
            },
        }
    }

    fn render(&self, out: &mut String, delex: bool) {
        let lab = |l: &Label| if delex { l.tagged() } else { l.to_string() };
        match self {
            EtNode::Phrase { label, children } => {
                out.push('(');
                out.push_str(&lab(label));
                for c in children {
                    out.push(' ');
                    c.render(out, delex);
                }
                out.push(')');
            }
            EtNode::Anchor { pos, token, .. } => {
                out.push('(');
                out.push_str(pos);
                out.push(' ');
                out.push_str(if delex { ANCHOR_MARK } else { token });
                out.push(')');
            }
            EtNode::Subst { label } => {
                out.push_str(&lab(label));
                out.push('↓');
            }
            EtNode::Foot { label } => {
                out.push_str(&lab(label));
                out.push('*');
            }
        }
    }
}

impl fmt::Display for EtNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render(&mut s, false);
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AnchorSpan {
    Token(usize),
    /// Inclusive token range of a multi-anchor tree.
    Span(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ElementaryTree {
    /// Index of the (first) anchor token; unique within a sentence.
    pub id: usize,
    pub kind: TreeKind,
    pub shape: EtNode,
    pub anchor: AnchorSpan,
    /// Reserved for named tree families.
    pub name: Option<String>,
}

impl ElementaryTree {
    pub fn subst_sites(&self) -> Vec<GornAddress> {
        self.shape.find_all(&|n| matches!(n, EtNode::Subst { .. }))
    }

    pub fn foot(&self) -> Option<GornAddress> {
        self.shape
            .find_all(&|n| matches!(n, EtNode::Foot { .. }))
            .into_iter()
            .next()
    }

    pub fn root_category(&self) -> &str {
        self.shape.category()
    }

    /// POS of the anchor with the smallest index.
    pub fn anchor_pos(&self) -> &str {
        let target = self.id;
        fn find(n: &EtNode, target: usize) -> Option<&str> {
            match n {
                EtNode::Anchor { pos, index, .. } if *index == target => Some(pos),
                _ => n.children().iter().find_map(|c| find(c, target)),
            }
        }
        find(&self.shape, target).unwrap_or("")
    }
}

impl fmt::Display for ElementaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.symbol(), self.shape)
    }
}

/// Canonical anchor-free rendering, e.g. `β:(NP (NNP ◇) NP*)`.
pub fn delexicalize(etree: &ElementaryTree) -> String {
    let mut s = String::new();
    s.push_str(etree.kind.symbol());
    s.push(':');
    etree.shape.render(&mut s, true);
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operation {
    Substitution,
    Adjunction,
}

/// How a child tree attaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Attachment {
    Substitution,
    /// Classic adjunction: the aux root takes the target's place and the
    /// target moves under the foot. `rank` orders several layers stacked on
    /// one node, innermost first.
    Layered { rank: usize },
    /// The aux tree's non-foot material is spliced into the target's
    /// children. `gap` counts the target's elementary children to the left.
    Sister { gap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AttachmentRecord {
    pub child: usize,
    pub parent: usize,
    pub address: GornAddress,
    pub attachment: Attachment,
}

impl AttachmentRecord {
    pub fn op(&self) -> Operation {
        match self.attachment {
            Attachment::Substitution => Operation::Substitution,
            _ => Operation::Adjunction,
        }
    }
}

/// Lexicalized grammar read off a corpus of extracted trees.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtractedGrammar {
    pub sigma: BTreeSet<String>,
    pub nt: BTreeSet<String>,
    pub initial: BTreeMap<String, usize>,
    pub auxiliary: BTreeMap<String, usize>,
    pub start: BTreeSet<String>,
}

impl ExtractedGrammar {
    pub fn add_sentence(&mut self, etrees: &[ElementaryTree], root: Option<usize>) {
        for et in etrees {
            et.shape.visit(&mut |n| match n {
                EtNode::Anchor { token, .. } => {
                    self.sigma.insert(token.clone());
                }
                EtNode::Phrase { label, .. } | EtNode::Subst { label } | EtNode::Foot { label } => {
                    self.nt.insert(label.category.clone());
                }
            });
            let bucket = match et.kind {
                TreeKind::Alpha => &mut self.initial,
                TreeKind::Beta => &mut self.auxiliary,
            };
            *bucket.entry(delexicalize(et)).or_insert(0) += 1;
            if Some(et.id) == root {
                self.start.insert(et.root_category().to_string());
            }
        }
    }

    pub fn template_count(&self) -> usize {
        self.initial.values().chain(self.auxiliary.values()).sum()
    }

    /// Templates with counts, most frequent first, ties broken lexically.
    pub fn ranked(&self) -> Vec<(String, usize)> {
        let mut all: Vec<(String, usize)> = self
            .initial
            .iter()
            .chain(self.auxiliary.iter())
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        all.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        all
    }
}

/// Result of decomposing one normalized sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub etrees: Vec<ElementaryTree>,
    pub records: Vec<AttachmentRecord>,
    pub root: usize,
}

struct Extractor<'t> {
    tables: &'t RuleTables,
    etrees: BTreeMap<usize, ElementaryTree>,
    records: Vec<AttachmentRecord>,
}

/// Decompose a normalized tree into one elementary tree per token.
pub fn extract(tree: &SyntaxTree, tables: &RuleTables) -> Extraction {
    let mut ex = Extractor {
        tables,
        etrees: BTreeMap::new(),
        records: Vec::new(),
    };
    let (base, layers) = ex.base(tree);
    let root = ex.head_token(base);
    let shape = ex.build(base, root, &GornAddress::root());
    ex.finish(root, TreeKind::Alpha, shape);
    ex.emit_layers(&layers, root, &GornAddress::root());
    let mut records = ex.records;
    records.sort_by_key(|r| r.child);
    Extraction {
        etrees: ex.etrees.into_values().collect(),
        records,
        root,
    }
}

impl<'t> Extractor<'t> {
    fn head(&self, n: &SyntaxTree) -> usize {
        match n {
            SyntaxTree::Phrase { label, children } => head_index(label, children, self.tables),
            SyntaxTree::PreTerminal { .. } => 0,
        }
    }

    fn head_token(&self, n: &SyntaxTree) -> usize {
        match n {
            SyntaxTree::PreTerminal { index, .. } => *index,
            SyntaxTree::Phrase { children, .. } => self.head_token(&children[self.head(n)]),
        }
    }

    fn core(&self, n: &SyntaxTree) -> Option<usize> {
        match n {
            SyntaxTree::Phrase { label, children } => layer_core(label, children, self.tables),
            SyntaxTree::PreTerminal { .. } => None,
        }
    }

    /// Strip adjunction layers: the innermost non-layer node and the layers
    /// above it, outermost first.
    fn base<'a>(&self, mut n: &'a SyntaxTree) -> (&'a SyntaxTree, Vec<&'a SyntaxTree>) {
        let mut layers = Vec::new();
        while let Some(c) = self.core(n) {
            layers.push(n);
            n = &n.children()[c];
        }
        (n, layers)
    }

    fn finish(&mut self, id: usize, kind: TreeKind, shape: EtNode) {
        self.etrees.insert(
            id,
            ElementaryTree {
                id,
                kind,
                shape,
                anchor: AnchorSpan::Token(id),
                name: None,
            },
        );
    }

    /// Layers stacked on the node at `addr` of tree `slot_owner`.
    fn emit_layers(&mut self, layers: &[&SyntaxTree], slot_owner: usize, addr: &GornAddress) {
        let n = layers.len();
        for (j, layer) in layers.iter().enumerate() {
            let rank = n - 1 - j;
            let core = self.core(layer).expect("layer has a core");
            let children = layer.children();
            let modifier = &children[1 - core];
            let owner = self.head_token(modifier);
            let foot = EtNode::Foot {
                label: children[core].label().expect("layer core is a phrase").clone(),
            };
            let mod_addr = GornAddress(vec![1 - core]);
            let (mbase, mlayers) = self.base(modifier);
            let mod_node = self.build(mbase, owner, &mod_addr);
            let kids = if core == 0 { vec![foot, mod_node] } else { vec![mod_node, foot] };
            let shape = EtNode::Phrase {
                label: layer.label().unwrap().clone(),
                children: kids,
            };
            self.finish(owner, TreeKind::Beta, shape);
            self.records.push(AttachmentRecord {
                child: owner,
                parent: slot_owner,
                address: addr.clone(),
                attachment: Attachment::Layered { rank },
            });
            self.emit_layers(&mlayers, owner, &mod_addr);
        }
    }

    /// Shape of `n` inside tree `owner`, where `n` sits at `addr`.
    fn build(&mut self, n: &SyntaxTree, owner: usize, addr: &GornAddress) -> EtNode {
        let (label, children) = match n {
            SyntaxTree::PreTerminal { pos, token, index } => {
                return EtNode::Anchor {
                    pos: pos.clone(),
                    token: token.clone(),
                    index: *index,
                }
            }
            SyntaxTree::Phrase { label, children } => (label, children),
        };
        let h = self.head(n);
        let roles: Vec<Role> = children
            .iter()
            .enumerate()
            .map(|(i, c)| self.tables.classify_child(label, c, i == h))
            .collect();
        let mut kept = Vec::new();
        for (i, child) in children.iter().enumerate() {
            match roles[i] {
                Role::Head => {
                    let at = addr.child(kept.len());
                    let (b, layers) = self.base(child);
                    kept.push(self.build(b, owner, &at));
                    self.emit_layers(&layers, owner, &at);
                }
                Role::Argument => {
                    let at = addr.child(kept.len());
                    let site_label = match child {
                        SyntaxTree::Phrase { label, .. } => label.clone(),
                        SyntaxTree::PreTerminal { pos, .. } => Label::new(pos.clone()),
                    };
                    kept.push(EtNode::Subst { label: site_label });
                    let (b, layers) = self.base(child);
                    let filler = self.head_token(b);
                    let shape = self.build(b, filler, &GornAddress::root());
                    self.finish(filler, TreeKind::Alpha, shape);
                    self.records.push(AttachmentRecord {
                        child: filler,
                        parent: owner,
                        address: at,
                        attachment: Attachment::Substitution,
                    });
                    self.emit_layers(&layers, filler, &GornAddress::root());
                }
                Role::Modifier | Role::Punct => {
                    let gap = kept.len();
                    let (b, layers) = self.base(child);
                    let aux = self.head_token(b);
                    let side = if i < h { 0 } else { 1 };
                    let mod_addr = GornAddress(vec![side]);
                    let mod_node = self.build(b, aux, &mod_addr);
                    let foot = EtNode::Foot { label: label.clone() };
                    let kids = if side == 0 { vec![mod_node, foot] } else { vec![foot, mod_node] };
                    self.finish(
                        aux,
                        TreeKind::Beta,
                        EtNode::Phrase {
                            label: label.clone(),
                            children: kids,
                        },
                    );
                    self.records.push(AttachmentRecord {
                        child: aux,
                        parent: owner,
                        address: addr.clone(),
                        attachment: Attachment::Sister { gap },
                    });
                    self.emit_layers(&layers, aux, &mod_addr);
                }
            }
        }
        EtNode::Phrase {
            label: label.clone(),
            children: kept,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::normalize;
    use crate::tree::parse_tree;

    const VINKEN: &str = "(S (NP-SBJ (NP (NNP Pierre) (NNP Vinken)) (, ,) (ADJP (NP (CD 61) (NNS years)) (JJ old)) (, ,)) (VP (MD will) (VP (VB join) (NP (DT the) (NN board)) (PP-CLR (IN as) (NP (DT a) (JJ nonexecutive) (NN director))) (NP-TMP (NNP Nov.) (CD 29)))) (. .))";

    fn extract_str(s: &str) -> Extraction {
        let tables = RuleTables::english();
        let n = normalize(&parse_tree(s).unwrap(), &tables).unwrap();
        extract(&n, &tables)
    }

    fn by_id(ex: &Extraction, id: usize) -> &ElementaryTree {
        ex.etrees.iter().find(|e| e.id == id).unwrap()
    }

    #[test]
    fn single_token() {
        let ex = extract_str("(NP (NN dogs))");
        assert_eq!(ex.etrees.len(), 1);
        assert_eq!(ex.etrees[0].to_string(), "α:(NP (NN dogs))");
        assert!(ex.records.is_empty());
        assert_eq!(ex.root, 1);
    }

    #[test]
    fn vinken_trees() {
        let ex = extract_str(VINKEN);
        assert_eq!(ex.etrees.len(), 18);
        assert_eq!(ex.records.len(), 17);
        assert_eq!(by_id(&ex, 9).to_string(), "α:(S NP-SBJ↓ (VP (VB join) NP↓ PP-CLR↓))");
        assert_eq!(by_id(&ex, 1).to_string(), "β:(NP (NNP Pierre) NP*)");
        assert_eq!(by_id(&ex, 8).to_string(), "β:(VP (MD will) VP*)");
        assert_eq!(by_id(&ex, 18).to_string(), "β:(S S* (PUNCT .))");
        assert_eq!(by_id(&ex, 2).to_string(), "α:(NP (NNP Vinken))");
        assert_eq!(by_id(&ex, 4).to_string(), "β:(NP (CD 61) NP*)");
        assert_eq!(by_id(&ex, 5).to_string(), "β:(NP-SBJ NP* (ADJP (NP (NNS years))))");
        assert_eq!(by_id(&ex, 17).to_string(), "β:(NP-TMP NP-TMP* (CD 29))");
        let alphas: Vec<usize> = ex
            .etrees
            .iter()
            .filter(|e| e.kind == TreeKind::Alpha)
            .map(|e| e.id)
            .collect();
        assert_eq!(alphas, vec![2, 9, 10, 11, 12, 13, 15]);
    }

    #[test]
    fn delexicalized_templates() {
        let ex = extract_str(VINKEN);
        assert_eq!(delexicalize(by_id(&ex, 1)), "β:(NP (NNP ◇) NP*)");
        assert_eq!(delexicalize(by_id(&ex, 9)), "α:(S NP-SBJ↓ (VP (VB ◇) NP↓ PP-CLR↓))");
        // the two commas share a shape up to the foot label
        assert_eq!(delexicalize(by_id(&ex, 3)), "β:(NP NP* (PUNCT ◇))");
        assert_eq!(delexicalize(by_id(&ex, 10)), delexicalize(by_id(&ex, 13)));
    }

    #[test]
    fn betas_have_matching_foot() {
        let ex = extract_str(VINKEN);
        for et in &ex.etrees {
            match et.kind {
                TreeKind::Beta => {
                    let foot = et.foot().expect("beta has a foot");
                    assert_eq!(et.shape.node_at(&foot).unwrap().category(), et.root_category());
                }
                TreeKind::Alpha => assert!(et.foot().is_none()),
            }
        }
    }

    #[test]
    fn grammar_counts() {
        let ex = extract_str(VINKEN);
        let mut g = ExtractedGrammar::default();
        g.add_sentence(&ex.etrees, Some(ex.root));
        assert_eq!(g.template_count(), 18);
        assert_eq!(g.initial.values().sum::<usize>(), 7);
        assert_eq!(g.auxiliary.values().sum::<usize>(), 11);
        assert!(g.start.contains("S"));
        assert!(g.sigma.contains("Vinken"));
    }
}
