//! Rewrite a treebank tree into the derived-tree shape that TAG
//! composition reproduces.
//!
//! The rewrite prunes empty elements, maps punctuation tags, turns phrasal
//! modifiers at the edges of a phrase into Chomsky-adjunction layers,
//! groups determiner-less material under an inner NP, and re-attaches every
//! punctuation mark as a layer over the constituent it follows.

use log::debug;
use thiserror::Error;

use crate::tables::{Role, RuleTables};
use crate::tree::{Label, SyntaxTree};

pub const EMPTY_ELEMENT_POS: &str = "-NONE-";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("sentence has no tokens once empty elements are removed")]
    EmptySentence,
}

/// Bare categories of a child list.
pub fn categories(children: &[SyntaxTree]) -> Vec<&str> {
    children.iter().map(|c| c.category()).collect()
}

/// If the phrase is a two-child adjunction layer `(X core mod)` or
/// `(X mod core)`, the index of its core.
///
/// The core is the child that is a phrase of the parent's category; the
/// other child must be a modifier or punctuation.
pub fn layer_core(label: &Label, children: &[SyntaxTree], tables: &RuleTables) -> Option<usize> {
    if children.len() != 2 {
        return None;
    }
    let same: Vec<usize> = (0..2)
        .filter(|&i| !children[i].is_preterminal() && children[i].category() == label.category)
        .collect();
    let core = match same.len() {
        1 => same[0],
        2 => tables.head_child(label, &categories(children)),
        _ => return None,
    };
    match tables.classify_child(label, &children[1 - core], false) {
        Role::Modifier | Role::Punct => Some(core),
        _ => None,
    }
}

/// Head child of a phrase: the core of an adjunction layer, otherwise what
/// the head table says.
pub fn head_index(label: &Label, children: &[SyntaxTree], tables: &RuleTables) -> usize {
    layer_core(label, children, tables)
        .unwrap_or_else(|| tables.head_child(label, &categories(children)))
}

pub fn normalize(tree: &SyntaxTree, tables: &RuleTables) -> Result<SyntaxTree, NormalizeError> {
    let mut pruned = 0usize;
    let mut t = prune_empty(tree, &mut pruned).ok_or(NormalizeError::EmptySentence)?;
    if pruned > 0 {
        debug!("pruned {} empty element(s)", pruned);
    }
    t.renumber();
    relabel(&mut t, tables);

    let total = t.token_count();
    let punct_count = t
        .preterminals()
        .iter()
        .filter(|p| tables.is_punct_pos(p.category()))
        .count();
    if punct_count == total || t.is_preterminal() {
        return Ok(restructure(t, tables));
    }
    let mut marks = Vec::new();
    let core = detach_punct(t, tables, &mut marks).expect("sentence has non-punctuation tokens");
    let mut out = restructure(core, tables);
    for mark in marks {
        out = reattach(out, mark, total);
    }
    Ok(out)
}

fn prune_empty(t: &SyntaxTree, pruned: &mut usize) -> Option<SyntaxTree> {
    match t {
        SyntaxTree::PreTerminal { pos, .. } if pos == EMPTY_ELEMENT_POS => {
            *pruned += 1;
            None
        }
        SyntaxTree::PreTerminal { .. } => Some(t.clone()),
        SyntaxTree::Phrase { label, children } => {
            let kept: Vec<SyntaxTree> = children.iter().filter_map(|c| prune_empty(c, pruned)).collect();
            if kept.is_empty() {
                None
            } else {
                Some(SyntaxTree::phrase(label.clone(), kept))
            }
        }
    }
}

fn relabel(t: &mut SyntaxTree, tables: &RuleTables) {
    match t {
        SyntaxTree::PreTerminal { pos, .. } => {
            let mapped = tables.derived_tag(pos).to_string();
            *pos = mapped;
        }
        SyntaxTree::Phrase { children, .. } => {
            for c in children {
                relabel(c, tables);
            }
        }
    }
}

fn detach_punct(t: SyntaxTree, tables: &RuleTables, marks: &mut Vec<SyntaxTree>) -> Option<SyntaxTree> {
    match t {
        SyntaxTree::PreTerminal { ref pos, .. } if tables.is_punct_pos(pos) => {
            marks.push(t);
            None
        }
        SyntaxTree::PreTerminal { .. } => Some(t),
        SyntaxTree::Phrase { label, children } => {
            let kept: Vec<SyntaxTree> = children
                .into_iter()
                .filter_map(|c| detach_punct(c, tables, marks))
                .collect();
            if kept.is_empty() {
                None
            } else {
                Some(SyntaxTree::phrase(label, kept))
            }
        }
    }
}

/// Bottom-up determiner grouping and modifier layering.
fn restructure(t: SyntaxTree, tables: &RuleTables) -> SyntaxTree {
    let (label, children) = match t {
        SyntaxTree::PreTerminal { .. } => return t,
        SyntaxTree::Phrase { label, children } => (label, children),
    };
    let children: Vec<SyntaxTree> = children.into_iter().map(|c| restructure(c, tables)).collect();
    let children = group_determiner(&label, children, tables);
    layer_modifiers(label, children, tables)
}

/// `(NP (DT a) (JJ x) (NN y) ...)` becomes `(NP (DT a) (NP (JJ x) (NN y)) ...)`.
fn group_determiner(label: &Label, children: Vec<SyntaxTree>, tables: &RuleTables) -> Vec<SyntaxTree> {
    if label.category != "NP" {
        return children;
    }
    let h = head_index(label, &children, tables);
    if !children[h].is_preterminal() {
        return children;
    }
    let det = (0..h).find(|&i| {
        children[i].is_preterminal()
            && tables.classify_child(label, &children[i], false) == Role::Argument
    });
    let d = match det {
        Some(d) => d,
        None => return children,
    };
    let has_modifier = (d + 1..h)
        .any(|i| tables.classify_child(label, &children[i], false) == Role::Modifier);
    if !has_modifier {
        return children;
    }
    let mut rest = children.clone();
    let tail = rest.split_off(h + 1);
    let inner_children = rest.split_off(d + 1);
    let inner = SyntaxTree::phrase(Label::new("NP"), inner_children);
    rest.push(inner);
    rest.extend(tail);
    if head_index(label, &rest, tables) == d + 1 {
        rest
    } else {
        children
    }
}

fn layer_modifiers(label: Label, children: Vec<SyntaxTree>, tables: &RuleTables) -> SyntaxTree {
    let h = head_index(&label, &children, tables);
    let layerable = |i: usize| {
        !children[i].is_preterminal()
            && tables.classify_child(&label, &children[i], false) == Role::Modifier
    };
    let mut start = 0;
    while start < h && layerable(start) {
        start += 1;
    }
    let mut end = children.len();
    while end > h + 1 && layerable(end - 1) {
        end -= 1;
    }
    if start == 0 && end == children.len() {
        return SyntaxTree::phrase(label, children);
    }
    match build_layers(&label, &children, h, start, end, tables) {
        Some(t) => t,
        None => SyntaxTree::phrase(label, children),
    }
}

fn build_layers(
    label: &Label,
    children: &[SyntaxTree],
    h: usize,
    start: usize,
    end: usize,
    tables: &RuleTables,
) -> Option<SyntaxTree> {
    let middle = &children[start..end];
    let mut cur = if middle.len() == 1
        && !middle[0].is_preterminal()
        && middle[0].category() == label.category
    {
        middle[0].clone()
    } else {
        if head_index(label, middle, tables) != h - start {
            return None;
        }
        SyntaxTree::phrase(label.clone(), middle.to_vec())
    };
    for m in &children[end..] {
        let layer = vec![cur, m.clone()];
        if layer_core(label, &layer, tables) != Some(0) {
            return None;
        }
        cur = SyntaxTree::phrase(label.clone(), layer);
    }
    for m in children[..start].iter().rev() {
        let layer = vec![m.clone(), cur];
        if layer_core(label, &layer, tables) != Some(1) {
            return None;
        }
        cur = SyntaxTree::phrase(label.clone(), layer);
    }
    Some(cur)
}

fn reattach(root: SyntaxTree, mark: SyntaxTree, total: usize) -> SyntaxTree {
    let k = mark.first_index().expect("punctuation carries an index");
    if k == total {
        return wrap(root, mark, true);
    }
    let present: Vec<usize> = root
        .preterminals()
        .iter()
        .filter_map(|p| p.first_index())
        .collect();
    if let Some(&prev) = present.iter().filter(|&&i| i < k).max() {
        attach_after(root, mark, prev)
    } else {
        let next = *present.iter().filter(|&&i| i > k).min().expect("some token follows");
        attach_before(root, mark, next)
    }
}

fn wrap(node: SyntaxTree, mark: SyntaxTree, after: bool) -> SyntaxTree {
    let label = node.label().expect("only phrases are wrapped").clone();
    let children = if after { vec![node, mark] } else { vec![mark, node] };
    SyntaxTree::phrase(label, children)
}

/// Layer `mark` over the highest constituent ending at token `prev`, or
/// insert it flat after that constituent when it is a single word.
fn attach_after(node: SyntaxTree, mark: SyntaxTree, prev: usize) -> SyntaxTree {
    if node.last_index() == Some(prev) && !node.is_preterminal() {
        return wrap(node, mark, true);
    }
    let (label, mut children) = match node {
        SyntaxTree::Phrase { label, children } => (label, children),
        leaf => return leaf,
    };
    let i = children
        .iter()
        .position(|c| c.first_index().unwrap() <= prev && prev <= c.last_index().unwrap())
        .expect("a child spans the preceding token");
    if children[i].is_preterminal() {
        children.insert(i + 1, mark);
    } else {
        let child = children.remove(i);
        children.insert(i, attach_after(child, mark, prev));
    }
    SyntaxTree::phrase(label, children)
}

fn attach_before(node: SyntaxTree, mark: SyntaxTree, next: usize) -> SyntaxTree {
    if node.first_index() == Some(next) && !node.is_preterminal() {
        return wrap(node, mark, false);
    }
    let (label, mut children) = match node {
        SyntaxTree::Phrase { label, children } => (label, children),
        leaf => return leaf,
    };
    let i = children
        .iter()
        .position(|c| c.first_index().unwrap() <= next && next <= c.last_index().unwrap())
        .expect("a child spans the following token");
    if children[i].is_preterminal() {
        children.insert(i, mark);
    } else {
        let child = children.remove(i);
        children.insert(i, attach_before(child, mark, next));
    }
    SyntaxTree::phrase(label, children)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_tree;

    fn norm(s: &str) -> SyntaxTree {
        normalize(&parse_tree(s).unwrap(), &RuleTables::english()).unwrap()
    }

    fn tree(s: &str) -> SyntaxTree {
        parse_tree(s).unwrap()
    }

    #[test]
    fn single_word_unchanged() {
        assert_eq!(norm("(NP (NN dogs))"), tree("(NP (NN dogs))"));
    }

    #[test]
    fn final_punct_layers_at_root() {
        assert_eq!(
            norm("(S (NP-SBJ (NNP kim)) (VP (VBZ sleeps)) (. .))"),
            tree("(S (S (NP-SBJ (NNP kim))(VP (VBZ sleeps)))(PUNCT .))")
        );
    }

    #[test]
    fn determiner_grouping() {
        assert_eq!(
            norm("(NP (DT a) (JJ nonexecutive) (NN director))"),
            tree("(NP (DT a) (NP (JJ nonexecutive) (NN director)))")
        );
        assert_eq!(norm("(NP (DT the) (NN board))"), tree("(NP (DT the) (NN board))"));
    }

    #[test]
    fn post_head_phrasal_modifier_layers() {
        assert_eq!(
            norm("(VP (VB join) (NP (NN x)) (NP-TMP (NN today)))"),
            tree("(VP (VP (VB join) (NP (NN x))) (NP-TMP (NN today)))")
        );
    }

    #[test]
    fn pre_head_phrasal_modifier_layers_outside() {
        assert_eq!(
            norm("(VP (ADVP (RB often)) (VBZ runs) (PP-LOC (IN in) (NP (NN town))))"),
            tree("(VP (ADVP (RB often)) (VP (VP (VBZ runs)) (PP-LOC (IN in) (NP (NN town)))))")
        );
    }

    #[test]
    fn medial_phrasal_modifier_stays_flat() {
        let s = "(VP (VB put) (ADVP (RB quickly)) (NP (NN x)))";
        assert_eq!(norm(s), tree(s));
    }

    #[test]
    fn traces_are_pruned() {
        assert_eq!(
            norm("(S (NP-SBJ (-NONE- *)) (VP (VBZ runs) (NP (NNS miles))))"),
            tree("(S (VP (VBZ runs) (NP (NNS miles))))")
        );
        let t = parse_tree("(S (NP (-NONE- *)))").unwrap();
        assert_eq!(
            normalize(&t, &RuleTables::english()),
            Err(NormalizeError::EmptySentence)
        );
    }

    #[test]
    fn punct_after_single_word_is_flat() {
        assert_eq!(
            norm("(S (NP-SBJ (NNP kim)) (VP (VBD said) (, ,) (S (NP-SBJ (PRP it)) (VP (VBD rained)))))"),
            tree("(S (NP-SBJ (NNP kim)) (VP (VBD said) (PUNCT ,) (S (NP-SBJ (PRP it)) (VP (VBD rained)))))")
        );
    }

    #[test]
    fn leading_punct_layers_before() {
        assert_eq!(
            norm("(S (`` ``) (NP-SBJ (NNP kim)) (VP (VBZ sleeps)))"),
            tree("(S (PUNCT ``) (S (NP-SBJ (NNP kim)) (VP (VBZ sleeps))))")
        );
    }

    #[test]
    fn all_punct_sentence() {
        assert_eq!(norm("(S (. .))"), tree("(S (PUNCT .))"));
    }
}
