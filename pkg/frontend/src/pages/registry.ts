/** Administrator registry page: the known principals and their roles. */

import { clear, docOf, el } from "../dom.js";
import type { Principal } from "../types.js";

export interface RegistryApi {
  principals(): Promise<{ principals: Principal[] }>;
}

export class RegistryPage {
  constructor(
    private root: HTMLElement,
    private api: RegistryApi,
  ) {}

  async load(): Promise<void> {
    const data = await this.api.principals();
    const doc = docOf(this.root);
    clear(this.root);
    this.root.appendChild(el(doc, "h2", { text: "Registered principals" }));
    const body = el(doc, "tbody");
    for (const principal of data.principals) {
      body.appendChild(
        el(doc, "tr", {
          attrs: { "data-testid": `principal-${principal.account_id}` },
          children: [
            el(doc, "td", { text: principal.account_id }),
            el(doc, "td", { text: principal.role }),
            el(doc, "td", { text: principal.display_name }),
          ],
        }),
      );
    }
    this.root.appendChild(
      el(doc, "table", {
        children: [
          el(doc, "thead", {
            children: [
              el(doc, "tr", {
                children: ["Account", "Role", "Name"].map((text) =>
                  el(doc, "th", { text }),
                ),
              }),
            ],
          }),
          body,
        ],
      }),
    );
  }
}
