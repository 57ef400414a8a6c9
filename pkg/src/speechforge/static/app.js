"use strict";(()=>{async function S(e){let n=await fetch(e);if(!n.ok)throw new Error(`${e} -> ${n.status}`);return await n.json()}function j(e,n=""){let t=new URLSearchParams;return t.set("page",String(e.page)),t.set("page_size",String(e.pageSize)),e.sort&&(t.set("sort",e.sort),t.set("dir",e.dir)),e.filter&&t.set("filter",e.filter),`${n}/api/samples?${t.toString()}`}var h={stats:(e="")=>S(`${e}/api/stats`),samples:(e,n="")=>S(j(e,n)),detail:(e,n="")=>S(`${n}/api/samples/${e}`),views:(e,n=600,t="")=>S(`${t}/api/samples/${e}/views?max_points=${n}`),words:(e,n,t=0,r=200,o="")=>S(`${o}/api/words?sort=${e}&dir=${n}&page=${t}&page_size=${r}`),audioUrl:(e,n="")=>`${n}/api/samples/${e}/audio`};function C(e){let n=[],t=[];for(let r of e)switch(r.kind){case"match":n.push({text:r.ref??"",kind:"plain"}),t.push({text:r.hyp??"",kind:"plain"});break;case"substitute":n.push({text:r.ref??"",kind:"substitute",pair:r.hyp}),t.push({text:r.hyp??"",kind:"substitute",pair:r.ref});break;case"delete":n.push({text:r.ref??"",kind:"delete"});break;case"insert":t.push({text:r.hyp??"",kind:"insert"});break}return{ref:n,hyp:t}}function a(e,n={},t=[]){let r=document.createElement(e);for(let[o,i]of Object.entries(n))o==="class"?r.className=i:r.setAttribute(o,i);for(let o of t)r.append(o);return r}function g(e){for(;e.firstChild;)e.removeChild(e.firstChild)}function _(e,n){let t;return(...r)=>{t!==void 0&&clearTimeout(t),t=setTimeout(()=>e(...r),n)}}var L=["id","text","pred_text","duration","wer","cer","score","char_rate"];function V(e,n){let t=e[n];return{raw:t,display:w(t)}}function w(e){return e==null?"":typeof e=="number"?Number.isInteger(e)?String(e):e.toFixed(4):String(e)}function H(e){let n={};for(let t of L)n[t]=V(e,t);return n}function R(e){return`${e.toFixed(4)} h`}function b(e){return e===void 0?"":`${(e*100).toFixed(1)}%`}var E=[[68,1,84],[71,44,122],[59,81,139],[44,113,142],[33,144,141],[39,173,129],[92,200,99],[170,220,50],[253,231,37]];function z(e){let n=Math.min(1,Math.max(0,e))*(E.length-1),t=Math.min(E.length-2,Math.floor(n)),r=n-t,o=E[t],i=E[t+1];return[Math.round(o[0]+r*(i[0]-o[0])),Math.round(o[1]+r*(i[1]-o[1])),Math.round(o[2]+r*(i[2]-o[2]))]}function I(e,n){let t=e.getContext("2d");if(!t)return;let{width:r,height:o}=e;t.clearRect(0,0,r,o),t.fillStyle="#10243a",t.fillRect(0,0,r,o);let i=n.envelope.length;if(i===0)return;let s=o/2;t.fillStyle="#6fc3ff";let c=Math.max(1,r/i);for(let d=0;d<i;d++){let[m,p]=n.envelope[d],l=d/i*r,u=s-p*s,f=s-m*s;t.fillRect(l,u,c,Math.max(1,f-u))}t.strokeStyle="rgba(255,255,255,0.25)",t.beginPath(),t.moveTo(0,s),t.lineTo(r,s),t.stroke()}function A(e,n){let t=e.getContext("2d");if(!t)return;let r=n.spectrogram.length,o=r>0?n.spectrogram[0].length:0;if(r===0||o===0)return;let i=1/0,s=-1/0;for(let l of n.spectrogram)for(let u of l)u<i&&(i=u),u>s&&(s=u);let c=Math.max(i,s-80),d=s-c||1,m=t.createImageData(r,o);for(let l=0;l<r;l++){let u=n.spectrogram[l];for(let f=0;f<o;f++){let[v,y,U]=z((u[f]-c)/d),x=((o-1-f)*r+l)*4;m.data[x]=v,m.data[x+1]=y,m.data[x+2]=U,m.data[x+3]=255}}let p=document.createElement("canvas");p.width=r,p.height=o,p.getContext("2d").putImageData(m,0,0),t.imageSmoothingEnabled=!0,t.clearRect(0,0,e.width,e.height),t.drawImage(p,0,0,e.width,e.height)}function Q(e,n,t){g(e);let r=a("button",{class:"back"},["\u2190 back to table"]);r.addEventListener("click",t);let o=a("div",{class:"detail"});e.append(r,o),h.detail(n).then(i=>{o.append(W(i)),o.append(a("div",{class:"texts"},[a("div",{class:"label"},["reference"]),N(i,"ref"),a("div",{class:"label"},["hypothesis"]),N(i,"hyp")])),o.append(q(n)),o.append(K(i));let s=a("canvas",{class:"wave",width:"900",height:"160","aria-label":"waveform"}),c=a("canvas",{class:"spec",width:"900",height:"240","aria-label":"spectrogram"});o.append(s,c),h.views(n).then(d=>{I(s,d),A(c,d)}).catch(()=>{s.replaceWith(a("div",{class:"notice"},["no audio available for rendering"])),c.remove()})}).catch(i=>{o.append(a("div",{class:"banner",role:"alert"},[String(i)]))})}function W(e){let n=a("div",{class:"badges"}),t=[["wer",b(e.wer)],["cer",b(e.cer)],["wmr",b(e.wmr)],["score",w(e.score)],["char_rate",w(e.char_rate)],["duration",`${w(e.duration)} s`]];for(let[r,o]of t)o&&n.append(a("span",{class:`badge badge-${r}`,"data-metric":r},[`${r} ${o}`]));return n}function N(e,n){let t=a("div",{class:`lane lane-${n}`});if(!e.diff)return t.append(n==="ref"?e.text:e.pred_text??""),t;let r=C(e.diff);for(let o of r[n]){let i=a("span",{class:`diff diff-${o.kind}`},[o.text]);o.pair&&(i.title=`\u2194 ${o.pair}`),t.append(i," ")}return t}function q(e){let n=a("div",{class:"player"}),t=a("audio",{controls:"",preload:"none"});return t.src=h.audioUrl(e),t.addEventListener("error",()=>{t.replaceWith(a("div",{class:"notice"},["audio missing \u2014 player disabled"]))}),n.append(t),n}function K(e){let n=a("div",{class:"signal"});if(!e.signal)return n;let t=e.signal;return n.append(a("span",{},[`sample rate ${t.sample_rate} Hz`]),a("span",{},[`peak ${t.peak_level.toFixed(2)} dBFS`]),a("span",{},[`bandwidth ${t.bandwidth.toFixed(0)} Hz`]),a("span",{},[`tail MA ratio ${t.tail_ma_ratio.toFixed(3)}`])),n}function P(e){g(e);let n=a("div",{class:"stats"});e.append(n),h.stats().then(t=>{n.append(a("div",{class:"headline"},[a("span",{class:"stat","data-stat":"hours"},[R(t.total_hours)]),a("span",{class:"stat","data-stat":"count"},[`${t.entry_count} utterances`]),a("span",{class:"stat"},[`${t.vocabulary_size} distinct words`])]));let r=a("div",{class:"alphabet"});for(let d of t.alphabet)r.append(a("span",{class:"chip"},[d===" "?"\u2423":d]));n.append(a("h3",{},[`alphabet (${t.alphabet.length})`]),r),n.append($("duration (s)",t.duration_histogram),$("characters / second",t.char_rate_histogram),$("words / second",t.word_rate_histogram)),n.append(a("h3",{},["word accuracy"]));let o=a("input",{type:"checkbox",id:"zero-acc"}),i=a("label",{for:"zero-acc"},["zero-accuracy words only"]),s=a("table",{class:"words"});n.append(a("div",{class:"words-controls"},[o,i]),s);let c=()=>J(s,o.checked);o.addEventListener("change",c),c()}).catch(t=>{n.append(a("div",{class:"banner",role:"alert"},[String(t)]))})}function $(e,n){let t=a("div",{class:"histogram"});t.append(a("h3",{},[e]));let r=a("div",{class:"bars"}),o=Math.max(1,...n.counts);return n.counts.forEach((i,s)=>{let c=a("div",{class:"bar",title:`${n.edges[s]}\u2013${n.edges[s+1]}: ${i}`,"data-count":String(i)});c.style.height=`${i/o*100}%`,r.append(c)}),t.append(r),t}function J(e,n){h.words("occurrences","desc",0,500).then(t=>{g(e);let r=a("tr");for(let s of["word","occurrences","matched","accuracy"])r.append(a("th",{},[s]));e.append(a("thead",{},[r]));let o=a("tbody"),i=n?t.items.filter(s=>s.accuracy===0):t.items;for(let s of i.slice(0,100))o.append(a("tr",{},[a("td",{},[s.word]),a("td",{},[String(s.occurrences)]),a("td",{},[String(s.matched)]),a("td",{},[b(s.accuracy)])]));e.append(o)}).catch(()=>{g(e),e.append(a("caption",{},["word table unavailable"]))})}var T={view:"table",page:0,pageSize:50,sort:null,dir:"asc",filter:"",detailId:null};function O(e){let n=new URLSearchParams;e.view!=="table"&&n.set("view",e.view),e.page!==0&&n.set("page",String(e.page)),e.pageSize!==T.pageSize&&n.set("page_size",String(e.pageSize)),e.sort&&(n.set("sort",e.sort),e.dir!=="asc"&&n.set("dir",e.dir)),e.filter&&n.set("filter",e.filter),e.detailId!==null&&n.set("id",String(e.detailId));let t=n.toString();return t?`?${t}`:""}function M(e){let n=new URLSearchParams(e),t=n.get("view"),r=n.get("sort"),o=n.get("dir"),i=n.get("id");return{view:t==="detail"||t==="stats"?t:"table",page:k(n.get("page"),0),pageSize:k(n.get("page_size"),T.pageSize),sort:r||null,dir:o==="desc"?"desc":"asc",filter:n.get("filter")??"",detailId:i===null?null:k(i,0)}}function k(e,n){if(e===null)return n;let t=Number.parseInt(e,10);return Number.isFinite(t)&&t>=0?t:n}function F(e,n){return e.sort!==n?{...e,sort:n,dir:"desc",page:0}:e.dir==="desc"?{...e,dir:"asc",page:0}:{...e,sort:null,dir:"asc",page:0}}var D=0;function B(e,n,t){g(e);let r=a("div",{class:"banner hidden",role:"alert"}),o=a("input",{class:"filter-box",type:"text",placeholder:"filter: field:op:value (e.g. cer:>:0.1, text:contains:foo)",value:n.filter,"aria-label":"filter samples"});o.addEventListener("input",_(()=>{t.onStateChange({...n,filter:o.value.trim(),page:0})},300));let i=a("table",{class:"samples"}),s=a("tr");for(let p of L){let l=a("th",{tabindex:"0",role:"button"},[p]);n.sort===p&&l.classList.add(n.dir==="asc"?"sorted-asc":"sorted-desc");let u=()=>t.onStateChange(F(n,p));l.addEventListener("click",u),l.addEventListener("keydown",f=>{(f.key==="Enter"||f.key===" ")&&(f.preventDefault(),u())}),s.append(l)}i.append(a("thead",{},[s]));let c=a("tbody");i.append(c);let d=a("div",{class:"pager"});e.append(r,o,i,d);let m=++D;h.samples(n).then(p=>{if(m===D){r.classList.add("hidden"),g(c);for(let l of p.items){let u=H(l),f=a("tr",{class:"sample-row","data-id":String(l.id)});for(let v of L){let y=u[v];f.append(a("td",{class:`col-${v}`,"data-raw":JSON.stringify(y.raw??null)},[y.display]))}f.addEventListener("click",()=>t.onOpenDetail(l.id)),c.append(f)}G(d,n,p.total,t)}}).catch(p=>{m===D&&(r.textContent=`request failed: ${String(p)}`,r.classList.remove("hidden"))})}function G(e,n,t,r){g(e);let o=Math.max(1,Math.ceil(t/n.pageSize)),i=a("button",{},["prev"]),s=a("button",{},["next"]);i.disabled=n.page<=0,s.disabled=n.page>=o-1,i.addEventListener("click",()=>r.onStateChange({...n,page:n.page-1})),s.addEventListener("click",()=>r.onStateChange({...n,page:n.page+1})),e.append(i,a("span",{class:"page-info"},[`page ${n.page+1} / ${o} \u2014 ${t} samples`]),s)}function X(){let e=document.getElementById("app"),n=document.getElementById("nav");if(!e||!n)return;let t=M(window.location.search),r=(i,s=!0)=>{t=i;let c=`${window.location.pathname}${O(t)}`;s&&window.history.pushState(null,"",c),o()},o=()=>{for(let i of n.querySelectorAll("a[data-view]"))i.classList.toggle("active",i.getAttribute("data-view")===t.view);t.view==="detail"&&t.detailId!==null?Q(e,t.detailId,()=>r({...t,view:"table",detailId:null})):t.view==="stats"?P(e):B(e,t,{onStateChange:i=>r(i),onOpenDetail:i=>r({...t,view:"detail",detailId:i})})};n.addEventListener("click",i=>{let s=i.target.closest("a[data-view]");if(!s)return;i.preventDefault();let c=s.getAttribute("data-view");r(c==="stats"?{...t,view:"stats"}:{...T,filter:t.filter})}),window.addEventListener("popstate",()=>{t=M(window.location.search),o()}),o()}document.addEventListener("DOMContentLoaded",X);})();
//# sourceMappingURL=app.js.map
