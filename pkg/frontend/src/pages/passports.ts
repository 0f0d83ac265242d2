/** Citizen passports page: list anonymized handles, exercise erasure.

Erasure is idempotent on the server (a repeat returns the original
acknowledgement), so the page reports both outcomes the same way and
re-renders the list from the service afterwards.
*/

import { clear, docOf, el } from "../dom.js";
import type { ErasureAck, PassportList } from "../types.js";

export interface PassportsApi {
  passports(): Promise<PassportList>;
  erase(anonCid: string): Promise<ErasureAck>;
}

export class PassportsPage {
  pending: Promise<void> = Promise.resolve();
  private notice = "";

  constructor(
    private root: HTMLElement,
    private api: PassportsApi,
  ) {}

  async load(): Promise<void> {
    const data = await this.api.passports();
    this.render(data);
  }

  async erase(anonCid: string): Promise<void> {
    const ack = await this.api.erase(anonCid);
    this.notice = ack.already
      ? `${anonCid.slice(0, 12)}... was already erased`
      : `${anonCid.slice(0, 12)}... erased`;
    await this.load();
  }

  private render(data: PassportList): void {
    const doc = docOf(this.root);
    clear(this.root);
    this.root.appendChild(el(doc, "h2", { text: "Your passports" }));
    if (this.notice) {
      this.root.appendChild(
        el(doc, "p", { className: "notice", text: this.notice }),
      );
    }
    if (data.anon_cids.length === 0) {
      this.root.appendChild(
        el(doc, "p", { className: "empty", text: "No live passports." }),
      );
      return;
    }
    const list = el(doc, "ul");
    for (const anon of data.anon_cids) {
      list.appendChild(
        el(doc, "li", {
          attrs: { "data-testid": `passport-${anon}` },
          children: [
            el(doc, "code", { text: anon }),
            el(doc, "button", {
              text: "Erase",
              attrs: { "data-action": "erase", "data-anon": anon },
              onClick: () => {
                this.pending = this.erase(anon);
              },
            }),
          ],
        }),
      );
    }
    this.root.appendChild(list);
  }
}
