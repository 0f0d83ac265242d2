/** Actor access page: request passport data by anonymized handle.

The requested operations are recorded on the ledger by the service
before the payload is released; a denial renders the server's reason.
*/

import { clear, docOf, el } from "../dom.js";
import { ApiError } from "../api.js";
import type { AccessResult } from "../types.js";

export interface AccessApi {
  access(anonCid: string, operations: string[]): Promise<AccessResult>;
}

export const OPERATIONS = ["read", "write", "delete", "update", "view"] as const;

export class AccessPage {
  pending: Promise<void> = Promise.resolve();
  private result: AccessResult | undefined;
  private error = "";

  constructor(
    private root: HTMLElement,
    private api: AccessApi,
  ) {}

  load(): void {
    this.render();
  }

  async request(anonCid: string, operations: string[]): Promise<void> {
    try {
      this.result = await this.api.access(anonCid, operations);
      this.error = "";
    } catch (exc) {
      this.result = undefined;
      this.error = exc instanceof ApiError ? exc.message : String(exc);
    }
    this.render();
  }

  private render(): void {
    const doc = docOf(this.root);
    clear(this.root);
    this.root.appendChild(el(doc, "h2", { text: "Access a passport" }));

    const input = el(doc, "input", {
      attrs: { name: "anon-cid", placeholder: "anonymized handle (64 hex chars)" },
    }) as HTMLInputElement;
    const checkboxes: HTMLInputElement[] = OPERATIONS.map((op) => {
      const box = el(doc, "input", {
        attrs: { type: "checkbox", name: `op-${op}`, value: op },
      }) as HTMLInputElement;
      if (op === "read") box.checked = true;
      return box;
    });
    const form = el(doc, "div", {
      className: "access-form",
      children: [
        input,
        el(doc, "span", {
          children: checkboxes.map((box, i) =>
            el(doc, "label", {
              children: [box],
              text: undefined,
              attrs: { "data-op": OPERATIONS[i] as string },
            }),
          ),
        }),
        el(doc, "button", {
          text: "Request access",
          attrs: { "data-action": "request-access" },
          onClick: () => {
            const operations = checkboxes
              .filter((box) => box.checked)
              .map((box) => box.value);
            this.pending = this.request(input.value.trim(), operations);
          },
        }),
      ],
    });
    this.root.appendChild(form);

    if (this.error) {
      this.root.appendChild(
        el(doc, "p", { className: "error", text: this.error }),
      );
    }
    if (this.result) {
      this.root.appendChild(
        el(doc, "p", {
          className: "subject",
          text: `Subject: ${this.result.subject} (CHI ${this.result.chi})`,
        }),
      );
      this.root.appendChild(
        el(doc, "pre", {
          attrs: { "data-testid": "passport-json" },
          text: JSON.stringify(this.result.passport, null, 2),
        }),
      );
    }
  }
}
