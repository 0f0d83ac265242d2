/** Shared test scaffolding: a detached DOM root and typed stubs. */

import { Window } from "happy-dom";

import type { VerificationReport } from "../src/types.js";

/** Fresh DOM tree backed by happy-dom; pages only touch ownerDocument. */
export function domRoot(): HTMLElement {
  const window = new Window({ url: "http://localhost/" });
  const root = window.document.createElement("div");
  window.document.body.appendChild(root);
  return root as unknown as HTMLElement;
}

export function click(root: HTMLElement, selector: string): void {
  const node = root.querySelector(selector) as HTMLElement | null;
  if (!node) {
    throw new Error(`no element matches ${selector}`);
  }
  node.click();
}

export function textOf(root: HTMLElement, selector: string): string {
  const node = root.querySelector(selector);
  if (!node) {
    throw new Error(`no element matches ${selector}`);
  }
  return (node.textContent ?? "").trim();
}

export function emptyReport(overrides: Partial<VerificationReport> = {}): VerificationReport {
  return {
    id: 1,
    generated_at: 0,
    citizens: ["citizen-1"],
    violators: [],
    reasons: {},
    erasure_violations: [],
    pending_erasures: [],
    ...overrides,
  };
}
