/** Consent page: published purposes with the citizen's current votes.

Every mutation round-trips through the service: a button click posts the
vote, then the whole table is rebuilt from a fresh GET so the rendered
state is always the server's, never a local toggle.
*/

import { clear, docOf, el } from "../dom.js";
import type { PurposesResponse, VoteAck } from "../types.js";

export interface ConsentApi {
  purposes(): Promise<PurposesResponse>;
  vote(votes: Array<[number, boolean]>): Promise<VoteAck>;
}

export type ConsentState = "consented" | "declined" | "no vote";

export function consentStateOf(
  consent: Record<string, boolean> | undefined,
  index: number,
): ConsentState {
  const choice = consent?.[String(index)];
  if (choice === undefined) return "no vote";
  return choice ? "consented" : "declined";
}

export class ConsentPage {
  /** Last in-flight mutation; tests and callers can await it. */
  pending: Promise<void> = Promise.resolve();

  constructor(
    private root: HTMLElement,
    private api: ConsentApi,
  ) {}

  async load(): Promise<void> {
    const data = await this.api.purposes();
    this.render(data);
  }

  async vote(index: number, choice: boolean): Promise<void> {
    await this.api.vote([[index, choice]]);
    await this.load();
  }

  private render(data: PurposesResponse): void {
    const doc = docOf(this.root);
    clear(this.root);
    this.root.appendChild(el(doc, "h2", { text: "Processing purposes" }));
    if (data.purposes.length === 0) {
      this.root.appendChild(
        el(doc, "p", { className: "empty", text: "No purposes published yet." }),
      );
      return;
    }
    const body = el(doc, "tbody");
    for (const purpose of data.purposes) {
      const state = consentStateOf(data.consent, purpose.index);
      const row = el(doc, "tr", {
        attrs: { "data-testid": `purpose-${purpose.index}` },
        children: [
          el(doc, "td", { text: String(purpose.index) }),
          el(doc, "td", { text: purpose.purpose }),
          el(doc, "td", { text: purpose.actor }),
          el(doc, "td", { text: purpose.operation }),
          el(doc, "td", {
            children: [
              el(doc, "span", {
                className: `state state-${state.replace(" ", "-")}`,
                attrs: { "data-testid": `state-${purpose.index}` },
                text: state,
              }),
            ],
          }),
          el(doc, "td", {
            children: [
              this.voteButton(doc, purpose.index, true, "Consent"),
              this.voteButton(doc, purpose.index, false, "Decline"),
            ],
          }),
        ],
      });
      body.appendChild(row);
    }
    const table = el(doc, "table", {
      children: [
        el(doc, "thead", {
          children: [
            el(doc, "tr", {
              children: ["#", "Purpose", "Actor", "Operation", "Your vote", ""].map(
                (text) => el(doc, "th", { text }),
              ),
            }),
          ],
        }),
        body,
      ],
    });
    this.root.appendChild(table);
  }

  private voteButton(
    doc: Document,
    index: number,
    choice: boolean,
    label: string,
  ): HTMLElement {
    return el(doc, "button", {
      text: label,
      attrs: {
        "data-action": choice ? "consent" : "decline",
        "data-index": String(index),
      },
      onClick: () => {
        this.pending = this.vote(index, choice);
      },
    });
  }
}
