/** Browser wiring: judge session, queue flow, ballots, dashboard. */

import { LabelApi } from './api.js';
import { BallotOutbox, BrowserStorage } from './retry.js';
import { FILE_PAGE_SIZE, pageFiles, projectDashboard } from './state.js';
import type { JudgeLabel, RepoSummary } from './types.js';
import { renderDashboard, renderError, renderQueueEmpty, renderRepository } from './view.js';

const api = new LabelApi('');
const outbox = new BallotOutbox(api, new BrowserStorage());

interface Session {
  judge: string;
  repo: RepoSummary | null;
  remaining: number;
  filePage: number;
}

const session: Session = { judge: '', repo: null, remaining: 0, filePage: 0 };

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function refreshDashboard(): Promise<void> {
  try {
    const progress = await api.progress();
    el('dashboard').innerHTML = renderDashboard(projectDashboard(progress, session.judge));
  } catch {
    /* dashboard is advisory; the queue flow surfaces errors */
  }
}

function renderCurrent(): void {
  const target = el('content');
  if (!session.repo) {
    target.innerHTML = renderQueueEmpty(session.judge);
    el('ballot-bar').hidden = true;
    return;
  }
  const files = pageFiles(session.repo.file_paths, session.filePage, FILE_PAGE_SIZE);
  session.filePage = files.page;
  target.innerHTML = renderRepository(session.repo, files);
  el('ballot-bar').hidden = false;
  el('remaining').textContent = `${session.remaining} remaining`;
}

async function loadNext(): Promise<void> {
  try {
    const queue = await api.queue(session.judge);
    session.remaining = queue.remaining;
    session.filePage = 0;
    session.repo = queue.current ? await api.repo(queue.current.full_name) : null;
    renderCurrent();
    void refreshDashboard();
  } catch (err) {
    el('content').innerHTML = renderError(`Could not load the queue: ${String(err)}`);
  }
}

async function submit(label: JudgeLabel): Promise<void> {
  if (!session.repo) return;
  const repoName = session.repo.full_name;
  const result = await outbox
    .submit({ repo_name: repoName, judge_id: session.judge, label })
    .catch((err) => {
      el('content').innerHTML = renderError(`Ballot rejected: ${String(err)}`);
      return null;
    });
  if (result === null && outbox.pendingCount > 0) {
    el('offline').textContent = `${outbox.pendingCount} ballot(s) queued for retry`;
  }
  await loadNext();
}

async function flushOutbox(): Promise<void> {
  if (outbox.pendingCount > 0) {
    await outbox.flush();
    el('offline').textContent =
      outbox.pendingCount > 0 ? `${outbox.pendingCount} ballot(s) queued for retry` : '';
  }
}

function startSession(judge: string): void {
  session.judge = judge;
  el('login').hidden = true;
  el('app').hidden = false;
  el('judge-name').textContent = judge;
  window.localStorage.setItem('repominer.judge', judge);
  void flushOutbox().then(loadNext);
}

export function boot(): void {
  el('login-form').addEventListener('submit', (event) => {
    event.preventDefault();
    const input = el('judge-input') as HTMLInputElement;
    if (input.value.trim()) startSession(input.value.trim());
  });
  el('ballot-bar').addEventListener('click', (event) => {
    const button = (event.target as HTMLElement).closest('button[data-label]');
    if (button) void submit(button.getAttribute('data-label') as JudgeLabel);
  });
  el('content').addEventListener('click', (event) => {
    const button = (event.target as HTMLElement).closest('button[data-action]');
    if (!button) return;
    const action = button.getAttribute('data-action');
    if (action === 'files-prev') session.filePage -= 1;
    else if (action === 'files-next') session.filePage += 1;
    else if (action === 'retry') {
      void loadNext();
      return;
    }
    renderCurrent();
  });
  window.setInterval(() => void flushOutbox(), 15000);
  const saved = window.localStorage.getItem('repominer.judge');
  if (saved) startSession(saved);
}

boot();
