/**
 * Pure HTML renderers. Every interpolated value is escaped, README text is
 * shown preformatted (never interpreted as markup), and external links are
 * displayed as inert text.
 */

import type { FilePage, DashboardView } from './state.js';
import type { RepoSummary } from './types.js';

export function escapeHtml(raw: string): string {
  return raw
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

function textOrEmpty(value: string): string {
  return value.trim() === '' ? '<em class="empty">(empty)</em>' : escapeHtml(value);
}

export function renderRepository(repo: RepoSummary, files: FilePage): string {
  const topics =
    repo.topics.length === 0
      ? '<em class="empty">(none)</em>'
      : repo.topics.map((t) => `<span class="topic">${escapeHtml(t)}</span>`).join(' ');
  const fileItems = files.slice.map((p) => `<li>${escapeHtml(p)}</li>`).join('');
  const pager =
    files.pageCount > 1
      ? `<button data-action="files-prev" ${files.page === 0 ? 'disabled' : ''}>&larr;</button>
         <button data-action="files-next" ${
           files.page >= files.pageCount - 1 ? 'disabled' : ''
         }>&rarr;</button>`
      : '';
  return `
  <article class="repo">
    <h2>${escapeHtml(repo.full_name)}</h2>
    <dl class="fields">
      <dt>Title</dt><dd>${textOrEmpty(repo.title)}</dd>
      <dt>Description</dt><dd>${textOrEmpty(repo.description)}</dd>
      <dt>Topics</dt><dd>${topics}</dd>
      <dt>Created</dt><dd>${escapeHtml(repo.created_at)}</dd>
      <dt>Modified</dt><dd>${escapeHtml(repo.modified_at)}</dd>
      <dt>Forks</dt><dd>${repo.fork_count}</dd>
      <dt>Watchers</dt><dd>${repo.watcher_count}</dd>
      <dt>Stars</dt><dd>${repo.star_count}</dd>
      <dt>Author followers</dt><dd>${repo.author_followers}</dd>
      <dt>Author following</dt><dd>${repo.author_following}</dd>
    </dl>
    <section class="readme">
      <h3>README</h3>
      <pre>${textOrEmpty(repo.readme)}</pre>
    </section>
    <section class="files">
      <h3>Files <span class="count">(${escapeHtml(files.rangeLabel)})</span></h3>
      <ul>${fileItems}</ul>
      ${pager}
    </section>
  </article>`;
}

export function renderQueueEmpty(judge: string): string {
  return `<p class="done">No repositories left for <strong>${escapeHtml(judge)}</strong>. Thank you.</p>`;
}

export function renderDashboard(view: DashboardView): string {
  const rate =
    view.agreementRate === null ? 'n/a' : `${(view.agreementRate * 100).toFixed(1)}%`;
  return `
  <section class="dashboard">
    <h3>Progress</h3>
    <table>
      <tr><td>Total repositories</td><td>${view.total}</td></tr>
      <tr><td>Pending</td><td>${view.pending}</td></tr>
      <tr><td>Kept malware</td><td>${view.keptMalware}</td></tr>
      <tr><td>Kept benign</td><td>${view.keptBenign}</td></tr>
      <tr><td>Excluded</td><td>${view.excluded}</td></tr>
      <tr><td>Agreement rate</td><td>${rate}</td></tr>
      <tr><td>Your ballots</td><td>${view.ownDone} done, ${view.ownRemaining} left</td></tr>
    </table>
  </section>`;
}

export function renderError(message: string): string {
  return `<div class="banner error">${escapeHtml(message)} <button data-action="retry">Retry</button></div>`;
}
