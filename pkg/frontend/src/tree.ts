/**
 * Program tree rendering: the program JSON snapshot -> a nested list in
 * the tree pane, one `li` per action, with block actions (if / loops)
 * holding their children in nested `ul`s.
 *
 * Rendering is a full rebuild on every change; drafts are tiny (nesting
 * is capped server-side) so there is nothing to gain from diffing.
 */

import {
  LoopCondition,
  ProgramAction,
  ProgramJson,
  ValueExpr,
} from "./protocol.js";

function describeExpr(expr: ValueExpr): string {
  switch (expr.kind) {
    case "literal":
      return `"${expr.value}"`;
    case "variable":
      return `the value of ${expr.name}`;
    case "user_input":
      return "the user's answer";
  }
}

function describeCondition(cond: LoopCondition): string {
  switch (cond.kind) {
    case "until_user_says":
      return `until you say "${cond.word}"`;
    case "variable_equals":
      return `${cond.variable} is "${cond.literal}"`;
    case "count_reached":
      return `${cond.times} times`;
  }
}

/** One-line label for a single action (children not included). */
export function actionLabel(action: ProgramAction): string {
  switch (action.kind) {
    case "say":
      return `say ${describeExpr(action.text)}`;
    case "play_sound":
      return `play the ${action.sound} sound`;
    case "get_user_input":
      return action.save_as === null
        ? "get user input"
        : `get user input and save it as ${action.save_as}`;
    case "create_variable":
      return `create a variable ${action.name} = ${describeExpr(action.initial)}`;
    case "set_variable":
      return `set ${action.name} to ${describeExpr(action.value)}`;
    case "if":
      return `if ${describeCondition(action.condition)}`;
    case "loop_until":
      return `loop ${describeCondition(action.condition)}`;
    case "repeat_times":
      return `repeat ${action.times} times`;
  }
}

/**
 * Compact structural signature: action kinds with children in brackets,
 * separated by spaces.  The finished animal-sounds program, for example:
 *
 *   loop_until[get_user_input if[play_sound] if[play_sound]
 *              if[play_sound] if[play_sound]]
 *
 * Tests assert on this to pin a tree's *shape* without caring about
 * names, words, or sounds.
 */
export function shapeSignature(actions: ProgramAction[]): string {
  return actions
    .map((action) => {
      switch (action.kind) {
        case "if": {
          const thenSig = shapeSignature(action.then);
          const elseSig =
            action.else === null ? "" : ` else[${shapeSignature(action.else)}]`;
          return `if[${thenSig}]${elseSig}`;
        }
        case "loop_until":
        case "repeat_times":
          return `${action.kind}[${shapeSignature(action.body)}]`;
        default:
          return action.kind;
      }
    })
    .join(" ");
}

function renderActions(doc: Document, actions: ProgramAction[]): HTMLUListElement {
  const list = doc.createElement("ul");
  for (const action of actions) {
    const item = doc.createElement("li");
    item.dataset.kind = action.kind;
    const label = doc.createElement("span");
    label.className = "node-label";
    label.textContent = actionLabel(action);
    item.appendChild(label);
    if (action.kind === "if") {
      item.appendChild(renderActions(doc, action.then));
      if (action.else !== null) {
        const otherwise = doc.createElement("span");
        otherwise.className = "node-label otherwise";
        otherwise.textContent = "otherwise";
        item.appendChild(otherwise);
        item.appendChild(renderActions(doc, action.else));
      }
    } else if (action.kind === "loop_until" || action.kind === "repeat_times") {
      item.appendChild(renderActions(doc, action.body));
    }
    list.appendChild(item);
  }
  return list;
}

/** Replace `container`'s content with the rendered tree (or placeholder). */
export function renderTree(
  doc: Document,
  container: Element,
  program: ProgramJson | null,
): void {
  container.textContent = "";
  if (program === null) {
    const empty = doc.createElement("p");
    empty.className = "tree-empty";
    empty.textContent = "No program yet. Say “create a program” to start one.";
    container.appendChild(empty);
    return;
  }
  const title = doc.createElement("p");
  title.className = "tree-title";
  title.textContent = `program ${program.name}`;
  container.appendChild(title);
  container.appendChild(renderActions(doc, program.actions));
}
